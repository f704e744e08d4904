import numpy as np
import pytest

from lowrankfb.errors import ContractViolation, InadmissiblePartition
from lowrankfb.fconstruct import (
    build_F, build_F_D_fullrank, build_F_D_zero, classify_causality, projector_diagonalizable, search_stable_F,
)
from lowrankfb.ratcore import Polynomial, RationalFunction, RationalMatrix, UnitCircleGrid, rm_equal_on_grid, simplify
from lowrankfb.ssreal import Realization, make_partition, normalize_D, partitions_with_nonsingular_C1B1

from _support import corpus, fixture, rel_coeff_error, rf

GRID = UnitCircleGrid.default()


def poly(*desc):
    return Polynomial(list(desc)[::-1])


def ratio(num, den):
    return simplify(RationalFunction(num, den))


def _check_entries(F, expected, tol):
    for i, e in enumerate(expected):
        assert rel_coeff_error(F[i, 0] if F.cols == 1 else F[0, i], e) < tol, (i, F[i, 0] if F.cols == 1 else F[0, i])


def test_counterexample_first_ordering():
    N = normalize_D(fixture("section5a").realization)
    r = build_F(N, list(partitions_with_nonsingular_C1B1(N))[0])
    assert rel_coeff_error(r.F[0, 0], rf([26, -27], [4, -14])) < 1e-9
    assert not r.stable
    assert r.mcmillan_degree == 1
    assert r.F0.shape == (1, 0) and r.F1.shape == (1, 1)


def test_counterexample_second_ordering():
    N = normalize_D(fixture("section5a").realization)
    r = build_F(N, list(partitions_with_nonsingular_C1B1(N))[1])
    assert rel_coeff_error(r.F[0, 0], rf([4, -14], [26, -27])) < 1e-9
    assert not r.stable


def test_search_on_counterexample():
    N = normalize_D(fixture("section5a").realization)
    res, any_stable = search_stable_F(N)
    assert len(res) == 2
    assert not any_stable


EX1_FIRST = [
    (poly(5) * poly(2, 3) * poly(5, -1), poly(3) * poly(10, -9) * poly(3, -1)),
    (poly(10, 49, -13), poly(3) * poly(10, -9) * poly(3, -1)),
    (poly(-6, 7) * poly(5, -1), poly(3) * poly(10, -9) * poly(3, -1)),
]
EX1_SECOND = [
    (poly(3) * poly(10, -9) * poly(3, -1), poly(5) * poly(2, 3) * poly(5, -1)),
    (poly(10, 49, -13), poly(5) * poly(2, 3) * poly(5, -1)),
    (poly(-6, 7) * poly(5, -1), poly(5) * poly(2, 3) * poly(5, -1)),
]


@pytest.mark.parametrize("builder", [build_F, build_F_D_zero])
def test_example1_first_ordering(builder):
    N = normalize_D(fixture("example1").realization)
    r = builder(N, make_partition(N, [0]))
    _check_entries(r.F, [ratio(n, d) for n, d in EX1_FIRST], 1e-9)
    assert r.stable
    assert r.mcmillan_degree == 2
    assert np.allclose(np.sort(r.poles.real), [1 / 3, 0.9], atol=1e-8)


@pytest.mark.parametrize("builder", [build_F, build_F_D_zero])
def test_example1_second_ordering(builder):
    N = normalize_D(fixture("example1").realization)
    r = builder(N, make_partition(N, [1]))
    _check_entries(r.F, [ratio(n, d) for n, d in EX1_SECOND], 1e-9)
    assert not r.stable
    assert r.mcmillan_degree == 2
    assert np.allclose(np.sort(r.poles.real), [-1.5, 0.2], atol=1e-8)


def test_example1_has_a_stable_ordering():
    res, any_stable = search_stable_F(normalize_D(fixture("example1").realization))
    assert any_stable and res[0].stable


def test_D_zero_with_m_equal_n_is_constant():
    A = np.array([[0.5, 0.1], [0.0, -0.4]])
    B = np.array([[1.0, 0.0], [0.0, 1.0]])
    C = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 3.0]])
    N = normalize_D(Realization(A, B, C, np.zeros((3, 2))))
    P = make_partition(N, [0, 1])
    r = build_F_D_zero(N, P)
    assert r.mcmillan_degree == 0 and r.stable
    assert np.allclose(r.F(0.3), [[2.0, 3.0]])
    assert rm_equal_on_grid(r.F, build_F(N, P).F, GRID).equal


CHI = poly(400, -1820, 6510, -2073)


@pytest.mark.parametrize("builder", [build_F, build_F_D_fullrank])
def test_example21(builder):
    N = normalize_D(fixture("example2_1").realization)
    r = builder(N, list(partitions_with_nonsingular_C1B1(N))[0])
    # exact rational computation gives +161 in the second numerator
    expected = [ratio(poly(-5) * poly(240, 56, -67), CHI), ratio(poly(-20) * poly(20, -521, 161), CHI)]
    _check_entries(r.F, expected, 1e-9)
    assert not r.stable
    assert r.mcmillan_degree == 3
    want = np.sort_complex(CHI.roots())
    assert np.allclose(np.sort_complex(r.poles), want, atol=1e-8)


@pytest.mark.parametrize("builder", [build_F, build_F_D_fullrank])
def test_example22(builder):
    N = normalize_D(fixture("example2_2").realization)
    r = builder(N, list(partitions_with_nonsingular_C1B1(N))[0])
    _check_entries(r.F, [rf([1], [1, -0.1]), rf([-1], [1, -0.1])], 1e-9)
    assert r.stable and r.mcmillan_degree == 1


def test_C2_zero_gives_zero_F():
    A = np.diag([0.5, -0.3])
    B = np.array([[1.0], [1.0]])
    C = np.array([[1.0, 0.0], [0.0, 0.0]])
    N = normalize_D(Realization(A, B, C, [[1.0], [0.0]]))
    r = build_F_D_fullrank(N, list(partitions_with_nonsingular_C1B1(N))[0])
    assert r.F[0, 0].is_zero() or np.max(np.abs(r.F(GRID.points))) < 1e-12
    assert not classify_causality(r.F).granger_u_to_y


def test_example3():
    N = normalize_D(fixture("example3").realization)
    r = build_F(N, list(partitions_with_nonsingular_C1B1(N))[0])
    den = poly(90, -363, -488)
    _check_entries(r.F0, [ratio(poly(210, 7), den), ratio(poly(-60, 50), den)], 1e-9)
    assert rel_coeff_error(r.F1[0, 0], ratio(poly(-300, 1520, 1793), poly(3) * den)) < 1e-9
    s = np.sqrt(34161)
    assert np.allclose(np.sort(r.poles.real), [(121 - s) / 60, (121 + s) / 60], atol=1e-8)
    assert not r.stable


def test_example3_raw_input_gives_same_F():
    a = build_F(*_first(fixture("example3")))
    b = build_F(*_first(fixture("example3_raw")))
    assert rm_equal_on_grid(a.F, b.F, GRID, tol=1e-8).equal


def _first(mf):
    N = normalize_D(mf.realization)
    return N, list(partitions_with_nonsingular_C1B1(N))[0]


def test_inadmissible_partition():
    N = normalize_D(fixture("section5a").realization)
    P = make_partition(N, [0])
    bad = P.__class__(P.perm, P.rho, P.m, P.C0, np.zeros_like(P.C1), P.C2, P.B0, P.B1)
    with pytest.raises(InadmissiblePartition):
        build_F(N, bad)


def test_search_with_p_equal_m():
    R = Realization([[0.5]], [[1.0]], [[1.0]], [[1.0]])
    assert search_stable_F(normalize_D(R)) == ([], False)


def test_representation_independence():
    R = fixture("example3_raw").realization
    rng = np.random.default_rng(3)
    Qm, _ = np.linalg.qr(rng.normal(size=(R.m, R.m)))
    R2 = Realization(R.A, R.B @ Qm, R.C, R.D @ Qm)
    a = build_F(*_first_perm(R, (0, 1, 2, 3)))
    b = build_F(*_first_perm(R2, (0, 1, 2, 3)))
    assert rm_equal_on_grid(a.F, b.F, GRID, tol=1e-8).equal


def _first_perm(R, perm):
    N = normalize_D(R)
    for P in partitions_with_nonsingular_C1B1(N):
        if tuple(P.perm) == perm:
            return N, P
    raise AssertionError("ordering not found")


def test_identities_and_degree_bounds_on_corpus():
    for R in corpus(30, seed=9):
        N = normalize_D(R)
        res, _ = search_stable_F(N)
        for r in res:
            assert r.residuals["left_kernel"] < 1e-8
            assert r.residuals["spectral"] < 1e-8
            assert r.residuals.get("f1_zform", 0.0) < 1e-8
            assert r.mcmillan_degree <= N.n
            if N.rho == 0 and projector_diagonalizable(r.partition):
                assert r.mcmillan_degree <= N.n - N.m
            radius = np.max(np.abs(r.poles)) if len(r.poles) else 0.0
            assert r.stable == (radius < 1 - 1e-10)


def test_projector_is_diagonalizable_for_example1():
    N = normalize_D(fixture("example1").realization)
    assert projector_diagonalizable(make_partition(N, [0]))
    assert projector_diagonalizable(make_partition(N, [1]))


# causality

def test_causality_zero_zero():
    Z = RationalMatrix.zeros(1, 1)
    v = classify_causality(Z, Z)
    assert (v.granger_u_to_y, v.feedback_y_to_u) == (False, False)


def test_causality_counterexample_with_feedback():
    F = RationalMatrix.scalar(rf([26, -27], [4, -14]))
    H = RationalMatrix.scalar(rf([90 / 137]))
    v = classify_causality(F, H)
    assert (v.granger_u_to_y, v.feedback_y_to_u) == (True, True)


def test_causality_stable_F_without_feedback():
    N = normalize_D(fixture("example1").realization)
    r = build_F(N, make_partition(N, [0]))
    v = classify_causality(r.F, RationalMatrix.zeros(1, 3))
    assert (v.granger_u_to_y, v.feedback_y_to_u) == (True, False)


def test_causality_violation():
    F = RationalMatrix.scalar(rf([26, -27], [4, -14]))
    with pytest.raises(ContractViolation):
        classify_causality(F, RationalMatrix.zeros(1, 1))
