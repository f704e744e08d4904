import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowrankfb.errors import InfeasibleSplit, SingularD, UnstableA
from lowrankfb.ratcore import RationalMatrix, UnitCircleGrid, rm_equal_on_grid
from lowrankfb.ssreal import (
    Realization, gammas, hankel_rank, invert_square, is_strictly_stable, make_partition, minimal_realization,
    normalize_D, observability_matrix, partitions_with_nonsingular_C1B1, reachability_matrix, transfer_function,
)

from _support import corpus, fixture, rel_coeff_error, rf

GRID = UnitCircleGrid.default()


def test_realization_dimensions_and_stability():
    R = fixture("section5a").realization
    assert (R.n, R.m, R.p) == (2, 1, 2)
    assert R.spectral_radius == pytest.approx(0.5)
    with pytest.raises(UnstableA):
        Realization([[1.5]], [[1]], [[1]], [[0]]).require_stable()


def test_transfer_function_integrator():
    W = transfer_function(Realization([[0.0]], [[1.0]], [[1.0]], [[0.0]]))
    assert rel_coeff_error(W[0, 0], rf([1], [1, 0])) < 1e-14


def test_transfer_function_wu_of_counterexample():
    R = fixture("section5a").realization
    W = transfer_function(R.rows([0]))
    assert rel_coeff_error(W[0, 0], rf([-8, 28], [4, 0, -1])) < 1e-12


def test_transfer_function_matches_state_space():
    R = fixture("example3").realization
    W = transfer_function(R)
    z = GRID.points
    assert np.allclose(W(z), R.evaluate(z), atol=1e-10)


def test_example22_third_row_cofactor_oracle():
    R = fixture("example2_2").realization
    W = transfer_function(R.rows([2]))
    # row 3 of C picks the third state: B[2, :] / (z - 1/10)
    assert rel_coeff_error(W[0, 0], rf([1], [1, -0.1])) < 1e-12
    assert rel_coeff_error(W[0, 1], rf([1], [1, -0.1])) < 1e-12


def test_invert_square_trivial():
    A = np.array([[0.2, 0.1], [0.0, -0.3]])
    C = np.array([[1.0, 2.0], [0.0, 1.0]])
    Ri = invert_square(Realization(A, np.zeros((2, 2)), C, np.eye(2)))
    assert np.allclose(Ri.A, A) and np.allclose(Ri.C, -C) and np.allclose(Ri.D, np.eye(2))
    assert rm_equal_on_grid(transfer_function(Ri), RationalMatrix.identity(2), GRID).equal


def test_invert_square_scalar_closed_form():
    a, b, d = 2.0, 0.4, 1.5
    R = Realization([[b]], [[1.0]], [[a]], [[d]])
    Wi = transfer_function(invert_square(R))
    # 1 / (a/(z-b) + d) = (z - b) / (d z - d b + a)
    assert rel_coeff_error(Wi[0, 0], rf([1, -b], [d, a - d * b])) < 1e-12


def test_invert_square_on_example21_block():
    N = normalize_D(fixture("example2_1").realization)
    R00 = N.base.rows([0, 1])
    prod = transfer_function(invert_square(R00)) @ transfer_function(R00)
    assert rm_equal_on_grid(prod, RationalMatrix.identity(2), GRID).equal


def test_invert_square_singular_D():
    with pytest.raises(SingularD):
        invert_square(Realization([[0.1]], [[1.0]], [[1.0]], [[0.0]]))


# normalization of D

def test_normalize_zero_D():
    R = fixture("section5a").realization
    N = normalize_D(R)
    assert N.rho == 0 and N.path == "zero"
    assert np.array_equal(N.U, np.eye(2)) and np.array_equal(N.V, np.eye(1))
    assert N.base is R


def test_normalize_example21_reproduces_printed_matrices():
    N = normalize_D(fixture("example2_1").realization)
    assert N.rho == 2
    assert np.allclose(np.diag(N.Sigma), [2, 1])
    assert np.allclose(N.base.B, [[1, 0], [2, -1], [0, 1]], atol=1e-12)
    assert np.allclose(N.base.C, [[-2, -3, 4], [-3, -1, -1], [-2, -2, -3]], atol=1e-12)
    s = 1 / np.sqrt(2)
    assert np.allclose(N.U, [[0, s, -s], [1, 0, 0], [0, s, s]], atol=1e-12)
    # the printed V' is our V transposed
    assert np.allclose(N.V.T, [[s, s], [-s, s]], atol=1e-12)


def test_normalize_keeps_signed_diagonal():
    N = normalize_D(fixture("example2_2").realization)
    assert N.path == "diagonal"
    assert np.allclose(np.diag(N.Sigma), [1, -1])
    N3 = normalize_D(fixture("example3").realization)
    assert np.allclose(np.diag(N3.Sigma), [-1, -3])


def test_normalize_example3_raw_matches_transformed():
    raw = normalize_D(fixture("example3_raw").realization)
    assert np.allclose(np.diag(raw.Sigma), [-1, -3])
    assert np.allclose(raw.base.B, fixture("example3").realization.B, atol=1e-12)
    assert np.allclose(raw.base.C, fixture("example3").realization.C, atol=1e-12)


def test_normalize_invariants_on_random_models():
    for R in corpus(20, seed=11):
        N = normalize_D(R)
        target = np.zeros_like(R.D)
        target[: N.rho, : N.rho] = N.Sigma
        assert np.allclose(N.U @ R.D @ N.V.T, target, atol=1e-10)
        assert np.allclose(N.U.T @ N.U, np.eye(R.p), atol=1e-12)
        assert np.allclose(N.V.T @ N.V, np.eye(R.m), atol=1e-12)
        z = GRID.points
        lhs = N.U @ R.evaluate(z) @ N.V.T
        assert np.allclose(lhs, N.base.evaluate(z), atol=1e-9)


# partitions

def test_partitions_of_counterexample():
    N = normalize_D(fixture("section5a").realization)
    parts = list(partitions_with_nonsingular_C1B1(N))
    assert len(parts) == 2
    assert parts[0].C1B1[0, 0] == pytest.approx(-2)
    # the second product is -13: C1 = [-2, 3], B = [2, -3]
    assert parts[1].C1B1[0, 0] == pytest.approx(-13)
    for P in parts:
        stacked = np.vstack([P.C0, P.C1, P.C2])
        assert np.allclose(stacked, N.base.C[list(P.perm)])


def test_partition_example1_first_row():
    N = normalize_D(fixture("example1").realization)
    P = make_partition(N, [0])
    assert P.C1B1[0, 0] == pytest.approx(9)


def test_partition_example3_third_row():
    N = normalize_D(fixture("example3").realization)
    P = list(partitions_with_nonsingular_C1B1(N))[0]
    assert list(P.perm) == [0, 1, 2, 3]
    assert P.C1B1[0, 0] == pytest.approx(-9)


def test_infeasible_split():
    R = Realization([[0.5]], [[1.0, 0.0]], [[1.0], [0.0], [1.0]], np.zeros((3, 2)))
    with pytest.raises(InfeasibleSplit):
        list(partitions_with_nonsingular_C1B1(normalize_D(R)))


# Gamma matrices

def test_gamma1_of_counterexample():
    N = normalize_D(fixture("section5a").realization)
    P = list(partitions_with_nonsingular_C1B1(N))[0]
    G = gammas(N, P)
    assert np.allclose(G.Gamma0, N.base.A)
    assert np.allclose(G.Gamma1, [[-2.5, -3], [5, 6]])
    assert np.allclose(np.sort(np.linalg.eigvals(G.Gamma1).real), [0, 3.5], atol=1e-12)
    ok, rad = is_strictly_stable(G.Gamma1)
    assert not ok and rad == pytest.approx(3.5)


def test_gamma0_of_example22():
    N = normalize_D(fixture("example2_2").realization)
    P = list(partitions_with_nonsingular_C1B1(N))[0]
    G = gammas(N, P)
    assert np.allclose(G.Gamma0, [[-5, -4.5, 0], [-7, -6.3, 0], [0, 0, 0.1]])
    assert np.allclose(G.Gamma1, G.Gamma0)


def test_gamma1_of_example3():
    N = normalize_D(fixture("example3").realization)
    P = list(partitions_with_nonsingular_C1B1(N))[0]
    G = gammas(N, P)
    assert np.allclose(G.Gamma0, [[-5 / 2, 44 / 5, 16 / 5], [-5 / 3, 17 / 5, 59 / 15], [2 / 3, 17 / 10, -61 / 30]])
    assert np.allclose(G.Gamma1[0], 0, atol=1e-12)
    assert np.linalg.matrix_rank(G.Gamma0) == 3
    assert np.linalg.matrix_rank(G.Gamma1) == 2


def test_gamma1_of_example1_is_stable():
    N = normalize_D(fixture("example1").realization)
    G = gammas(N, make_partition(N, [0]))
    ok, rad = is_strictly_stable(G.Gamma1)
    assert ok and rad == pytest.approx(0.9)
    assert is_strictly_stable(np.zeros((3, 3))) == (True, 0.0)


# minimality

def test_minimal_realization_keeps_minimal_scalar():
    R = Realization([[0.4]], [[1.0]], [[2.0]], [[0.0]])
    assert minimal_realization(R).n == 1


def test_minimal_realization_removes_unobservable_mode():
    A = np.diag([0.5, -0.2])
    R = Realization(A, [[1.0], [1.0]], [[1.0, 0.0]], [[0.0]])
    Rm = minimal_realization(R)
    assert Rm.n == 1
    assert rm_equal_on_grid(transfer_function(Rm), transfer_function(R), GRID, tol=1e-7).equal


def test_minimal_realization_with_widely_spread_poles():
    # a far-out pole makes O @ R span many decades; no true mode may be dropped
    rng = np.random.default_rng(4)
    A = np.diag([18.7, 1.07, -0.21, 0.0])
    T = rng.normal(size=(4, 4))
    B = np.array([[1.0], [0.5], [0.3], [0.0]])
    C = np.array([[0.2, 1.0, 0.7, 1.0]])
    R = Realization(T @ A @ np.linalg.inv(T), T @ B, C @ np.linalg.inv(T), [[0.0]])
    Rm = minimal_realization(R)
    assert Rm.n == 3
    assert np.allclose(np.sort(np.linalg.eigvals(Rm.A).real), [-0.21, 1.07, 18.7], atol=1e-8)
    z = np.exp(1j * np.linspace(0.1, 3, 7))
    assert np.allclose(Rm.evaluate(z), R.evaluate(z), atol=1e-10)


def test_example22_rank_OR_is_one():
    N = normalize_D(fixture("example2_2").realization)
    P = list(partitions_with_nonsingular_C1B1(N))[0]
    G = gammas(N, P)
    Rf = Realization(G.Gamma0, N.base.B @ np.linalg.inv(N.Sigma), P.C2, np.zeros((1, 2)))
    O = observability_matrix(Rf.A, Rf.C)
    Rr = reachability_matrix(Rf.A, Rf.B)
    assert np.linalg.matrix_rank(O @ Rr) == 1
    assert hankel_rank(Rf) == 1
    assert minimal_realization(Rf).n == 1


def test_minimal_output_has_full_rank_OR():
    for R in corpus(10, seed=5):
        Rm = minimal_realization(R)
        if Rm.n:
            O = observability_matrix(Rm.A, Rm.C)
            Rr = reachability_matrix(Rm.A, Rm.B)
            assert np.linalg.matrix_rank(O @ Rr) == Rm.n


# algebraic facts behind the rank bounds

@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10_000))
def test_nonzero_eigenvalues_of_AB_and_BA(m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(m, n))
    B = rng.normal(size=(n, m))
    e1 = np.linalg.eigvals(A @ B)
    e2 = np.linalg.eigvals(B @ A)
    e1 = np.sort_complex(e1[np.abs(e1) > 1e-8])
    e2 = np.sort_complex(e2[np.abs(e2) > 1e-8])
    assert len(e1) == len(e2)
    assert np.allclose(e1, e2, atol=1e-8)


def test_gamma1_rank_bound_on_corpus():
    from lowrankfb.fconstruct import projector_diagonalizable

    checked = 0
    for R in corpus(50):
        N = normalize_D(R)
        for P in partitions_with_nonsingular_C1B1(N):
            if not projector_diagonalizable(P):
                continue
            G = gammas(N, P)
            s = np.linalg.svd(G.Gamma1, compute_uv=False)
            rank = int(np.sum(s > 1e-9 * max(1.0, s[0])))
            assert rank <= N.n - (N.m - N.rho)
            checked += 1
    assert checked > 0


def test_schur_complement_is_not_identically_singular():
    from lowrankfb.ratcore import rm_det

    for name in ("example3", "section5a", "example1"):
        N = normalize_D(fixture(name).realization)
        for P in partitions_with_nonsingular_C1B1(N):
            G = gammas(N, P)
            S = transfer_function(Realization(G.Gamma0, P.B1, P.C1, np.zeros((P.C1.shape[0], P.B1.shape[1]))))
            d = rm_det(S)
            assert np.max(np.abs(d(GRID.points))) > 1e-8
