"""State-space realizations of spectral factors.

Covers transfer-function extraction, normalization of the feedthrough
matrix, enumeration of admissible row splits, the derived matrices
``Gamma0`` and ``Gamma1``, and minimal realizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import null_space

from .errors import DimensionMismatch, InfeasibleSplit, SingularD, UnstableA
from .ratcore import Polynomial, RationalFunction, RationalMatrix, simplify

TOL_RANK = 1e-9


def _mat(x, rows=None, cols=None):
    a = np.array(x, dtype=float)
    if a.size == 0:
        return np.zeros((rows or 0, cols or 0))
    return np.atleast_2d(a)


@dataclass(frozen=True)
class Realization:
    """Quadruple ``(A, B, C, D)`` for ``W(z) = C (zI - A)^{-1} B + D``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        D = _mat(self.D)
        p, m = D.shape
        A = _mat(self.A, 0, 0)
        n = A.shape[0]
        B = _mat(self.B, n, m).reshape(n, m) if n * m else np.zeros((n, m))
        C = _mat(self.C, p, n).reshape(p, n) if p * n else np.zeros((p, n))
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        for name, arr in (("A", A), ("B", B), ("C", C), ("D", D)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.D.shape[1]

    @property
    def p(self) -> int:
        return self.D.shape[0]

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.A)))) if self.n else 0.0

    def require_stable(self):
        rad = self.spectral_radius
        if not rad < 1:
            raise UnstableA(f"A has spectral radius {rad:.6g} >= 1", radius=rad)
        return self

    def evaluate(self, z):
        """Frequency response at the points ``z`` (shape ``(..., p, m)``)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape + (self.p, self.m), dtype=complex)
        I = np.eye(self.n)
        for idx, zk in np.ndenumerate(z):
            if self.n:
                out[idx] = self.C @ np.linalg.solve(zk * I - self.A, self.B) + self.D
            else:
                out[idx] = self.D
        return out

    def rows(self, idx):
        idx = list(idx)
        return Realization(self.A, self.B, self.C[idx, :], self.D[idx, :])

    def cols(self, idx):
        idx = list(idx)
        return Realization(self.A, self.B[:, idx], self.C, self.D[:, idx])


def _charpoly(A) -> Polynomial:
    if A.shape[0] == 0:
        return Polynomial([1.0])
    return Polynomial(np.poly(A)[::-1])


def polynomial_form(R: Realization):
    """Unsimplified ``W = N(z) / chi(z)`` with ``chi = det(zI - A)``.

    Returns ``(N, chi)`` with N a nested list of Polynomials.
    """
    chi = _charpoly(R.A)
    N = []
    for i in range(R.p):
        row = []
        for j in range(R.m):
            if R.n:
                num = _charpoly(R.A - R.B[:, [j]] @ R.C[[i], :]) - chi + R.D[i, j] * chi
            else:
                num = Polynomial([R.D[i, j]])
            row.append(num)
        N.append(row)
    return N, chi


def transfer_function(R: Realization, tol: float = 1e-7) -> RationalMatrix:
    """Rational matrix of ``C (zI - A)^{-1} B + D``.

    Each scalar entry is first reduced to a minimal realization, so that
    pole-zero cancellations happen by orthogonal projection rather than by
    matching roots.  The entry then follows from the determinant identity
    ``c (zI - A)^{-1} b = (det(zI - A + b c) - det(zI - A)) / det(zI - A)``
    and is simplified to catch near-cancellations.
    """
    out = []
    for i in range(R.p):
        row = []
        for j in range(R.m):
            if R.n:
                e = minimal_realization(Realization(R.A, R.B[:, [j]], R.C[[i], :], R.D[[i], [j]].reshape(1, 1)))
                chi = _charpoly(e.A)
                num = _charpoly(e.A - e.B @ e.C) - chi + e.D[0, 0] * chi if e.n else Polynomial([e.D[0, 0]])
            else:
                chi = Polynomial([1.0])
                num = Polynomial([R.D[i, j]])
            row.append(simplify(RationalFunction(num, chi), tol))
        out.append(row)
    return RationalMatrix(out, R.p, R.m)


def invert_square(R: Realization) -> Realization:
    """Realization of ``W(z)^{-1}`` for square ``W`` with invertible ``D``.

    Returns ``(A - B D^{-1} C, B D^{-1}, -D^{-1} C, D^{-1})``.
    """
    if R.p != R.m:
        raise DimensionMismatch("invert_square needs a square transfer function")
    s = np.linalg.svd(R.D, compute_uv=False) if R.m else np.zeros(0)
    if R.m and (s[-1] <= TOL_RANK * max(1.0, s[0])):
        raise SingularD("feedthrough matrix D is singular")
    Di = np.linalg.inv(R.D)
    return Realization(R.A - R.B @ Di @ R.C, R.B @ Di, -Di @ R.C, Di)


# ---------------------------------------------------------------------------
# normalization of D


@dataclass(frozen=True)
class NormalizedFactor:
    """Spectral factor after the change of coordinates ``(B, C) -> (B V^T, U C)``.

    Attributes
    ----------
    base : Realization
        Transformed realization, with ``base.D = [[Sigma, 0], [0, 0]]``.
    Sigma : ndarray
        ``rho x rho`` diagonal matrix (entries may be negative when the
        input arrived already diagonal).
    U, V : ndarray
        Orthogonal matrices with ``U @ D @ V.T = base.D``.
    rho : int
        Numerical rank of the original ``D``.
    original : Realization
    """

    base: Realization
    Sigma: np.ndarray
    U: np.ndarray
    V: np.ndarray
    rho: int
    original: Realization
    path: str = "svd"

    @property
    def n(self):
        return self.base.n

    @property
    def m(self):
        return self.base.m

    @property
    def p(self):
        return self.base.p


def _first_positive(v):
    nz = np.flatnonzero(np.abs(v) > 1e-12 * max(1.0, np.max(np.abs(v))))
    return -v if nz.size and v[nz[0]] < 0 else v


def _last_positive(v):
    nz = np.flatnonzero(np.abs(v) > 1e-12 * max(1.0, np.max(np.abs(v))))
    return -v if nz.size and v[nz[-1]] < 0 else v


def _complete_basis(rows, dim):
    """Rows spanning the orthogonal complement, sign-fixed."""
    if rows.shape[0] == 0:
        basis = np.eye(dim)
    else:
        basis = null_space(rows).T
    return np.array([_last_positive(b) for b in basis]).reshape(-1, dim)


def normalize_D(R: Realization, tol_rank: float = TOL_RANK) -> NormalizedFactor:
    """Rotate inputs and outputs so that ``D`` becomes ``[[Sigma, 0], [0, 0]]``.

    Three paths, tried in order:

    1. ``D`` already has the target shape: ``U = V = I`` and ``Sigma`` is
       read off verbatim, signs included.
    2. The nonzero rows of ``D`` are its leading rows and are mutually
       orthogonal: ``U = I`` and each right vector is the normalized row.
    3. General SVD.

    Right singular vectors are signed so that their first nonzero entry is
    positive; basis vectors of null spaces so that their last nonzero
    entry is positive.
    """
    D = R.D
    p, m = D.shape
    sv = np.linalg.svd(D, compute_uv=False) if D.size else np.zeros(0)
    smax = sv[0] if sv.size else 0.0
    if smax <= 1e-300:
        return NormalizedFactor(R, np.zeros((0, 0)), np.eye(p), np.eye(m), 0, R, "zero")
    thr = tol_rank * smax
    rho = int(np.sum(sv > thr))
    small = np.abs(D) <= thr

    lead = np.diag(D[:rho, :rho]) if rho else np.zeros(0)
    mask = np.ones_like(small)
    mask[np.arange(rho), np.arange(rho)] = False
    if np.all(np.abs(lead) > thr) and np.all(small[mask]):
        Sigma = np.diag(lead)
        return NormalizedFactor(R, Sigma, np.eye(p), np.eye(m), rho, R, "diagonal")

    rows = D[:rho]
    gram = rows @ rows.T
    if np.all(small[rho:]) and np.allclose(gram - np.diag(np.diag(gram)), 0, atol=thr * smax):
        vs = np.array([_first_positive(r / np.linalg.norm(r)) for r in rows])
        sig = np.array([r @ v for r, v in zip(rows, vs)])
        V = np.vstack([vs, _complete_basis(vs, m)])
        U = np.eye(p)
        path = "orthogonal-rows"
    else:
        Un, s, Vh = np.linalg.svd(D)
        vs = Vh[:rho].copy()
        us = Un[:, :rho].copy()
        for k in range(rho):
            v = _first_positive(vs[k])
            if not np.array_equal(v, vs[k]):
                us[:, k] = -us[:, k]
            vs[k] = v
        sig = s[:rho]
        V = np.vstack([vs, _complete_basis(vs, m)])
        U = np.vstack([us.T, _complete_basis(us.T, p)])
        path = "svd"
    Sigma = np.diag(sig)
    base = Realization(R.A, R.B @ V.T, U @ R.C, _clean(U @ D @ V.T, thr))
    return NormalizedFactor(base, Sigma, U, V, rho, R, path)


def _clean(M, thr):
    M = np.array(M)
    M[np.abs(M) <= thr] = 0.0
    return M


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class OrderedPartition:
    """Split of the (normalized) components into ``u0``, ``u1`` and ``y``.

    ``perm`` lists the original component indices in the new order; the
    first ``rho`` are pinned, the next ``m - rho`` form ``C1``.
    """

    perm: tuple
    rho: int
    m: int
    C0: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    B0: np.ndarray
    B1: np.ndarray

    @property
    def u_indices(self):
        return self.perm[: self.m]

    @property
    def y_indices(self):
        return self.perm[self.m :]

    @property
    def C1B1(self):
        return self.C1 @ self.B1

    def label(self):
        return {"u": list(self.u_indices), "y": list(self.y_indices)}


def make_partition(N: NormalizedFactor, c1_rows) -> OrderedPartition:
    """Partition with ``C1`` taken from the listed rows of ``base.C``."""
    rho, m, p = N.rho, N.m, N.p
    c1_rows = tuple(int(i) for i in c1_rows)
    if len(c1_rows) != m - rho or any(i < rho or i >= p for i in c1_rows) or len(set(c1_rows)) != len(c1_rows):
        raise ValueError(f"C1 rows {c1_rows} are not a valid choice of {m - rho} rows among {rho}..{p - 1}")
    rest = tuple(i for i in range(rho, p) if i not in c1_rows)
    perm = tuple(range(rho)) + c1_rows + rest
    C, B = N.base.C, N.base.B
    return OrderedPartition(
        perm=perm, rho=rho, m=m,
        C0=C[:rho], C1=C[list(c1_rows)], C2=C[list(rest)],
        B0=B[:, :rho], B1=B[:, rho:],
    )


def is_admissible(P: OrderedPartition, tol_rank: float = TOL_RANK) -> bool:
    k = P.m - P.rho
    if k == 0:
        return True
    s = np.linalg.svd(P.C1B1, compute_uv=False)
    scale = max(1.0, np.linalg.norm(P.C1, 2) * np.linalg.norm(P.B1, 2))
    return bool(s[-1] > tol_rank * scale)


def partitions_with_nonsingular_C1B1(N: NormalizedFactor, tol_rank: float = TOL_RANK):
    """All admissible partitions, in lexicographic order of the ``C1`` rows.

    Raises
    ------
    InfeasibleSplit
        If ``m - rho > n``; then ``C1 B1`` cannot be invertible.
    """
    k = N.m - N.rho
    if k > N.n:
        raise InfeasibleSplit(f"m - rho = {k} exceeds the state dimension n = {N.n}")
    out = []
    for rows in combinations(range(N.rho, N.p), k):
        P = make_partition(N, rows)
        if is_admissible(P, tol_rank):
            out.append(P)
    return out


@dataclass(frozen=True)
class GammaPair:
    Gamma0: np.ndarray
    Gamma1: np.ndarray


def gammas(N: NormalizedFactor, P: OrderedPartition) -> GammaPair:
    A = N.base.A
    if P.rho:
        G0 = A - P.B0 @ np.linalg.solve(N.Sigma, P.C0)
    else:
        G0 = A.copy()
    if P.m > P.rho:
        G1 = G0 - P.B1 @ np.linalg.solve(P.C1B1, P.C1 @ G0)
    else:
        G1 = G0.copy()
    return GammaPair(G0, G1)


def is_strictly_stable(M, margin: float = 1e-10):
    """Return ``(stable, spectral_radius)`` with stability meaning radius < 1 - margin."""
    M = np.atleast_2d(np.asarray(M, dtype=float)) if np.size(M) else np.zeros((0, 0))
    rad = float(np.max(np.abs(np.linalg.eigvals(M)))) if M.shape[0] else 0.0
    return rad < 1 - margin, rad


# ---------------------------------------------------------------------------
# minimality


def observability_matrix(A, C, k=None):
    n = A.shape[0]
    k = n if k is None else k
    blocks, cur = [], C
    for _ in range(k):
        blocks.append(cur)
        cur = cur @ A
    return np.vstack(blocks) if blocks else np.zeros((0, n))


def reachability_matrix(A, B, k=None):
    n = A.shape[0]
    k = n if k is None else k
    blocks, cur = [], B
    for _ in range(k):
        blocks.append(cur)
        cur = A @ cur
    return np.hstack(blocks) if blocks else np.zeros((n, 0))


def hankel_rank(R: Realization, tol_rank: float = TOL_RANK) -> int:
    """Numerical rank of ``O @ R`` (observability times reachability)."""
    if R.n == 0:
        return 0
    H = observability_matrix(R.A, R.C) @ reachability_matrix(R.A, R.B)
    if H.size == 0:
        return 0
    s = np.linalg.svd(H, compute_uv=False)
    return int(np.sum(s > tol_rank * max(s[0], 1e-300))) if s[0] > 1e-13 else 0


def _reachable_basis(A: np.ndarray, B: np.ndarray, tol_rank: float) -> np.ndarray:
    """Orthonormal basis of the reachable subspace by a staircase iteration."""
    n = A.shape[0]
    scale = max(1.0, np.linalg.norm(A, 2), np.linalg.norm(B, 2) if B.size else 0.0)
    Q = np.zeros((n, 0))
    new = B
    while new.size and Q.shape[1] < n:
        new = new - Q @ (Q.T @ new)
        U, s, _ = np.linalg.svd(new, full_matrices=False)
        r = int(np.sum(s > tol_rank * scale))
        if r == 0:
            break
        Qn = U[:, :r]
        # one re-orthogonalization pass keeps Q orthonormal to working precision
        Qn = Qn - Q @ (Q.T @ Qn)
        Qn, _ = np.linalg.qr(Qn)
        Q = np.hstack([Q, Qn])
        new = A @ Qn
    return Q


def minimal_realization(R: Realization, tol_rank: float = TOL_RANK) -> Realization:
    """Minimal realization by orthogonal staircase reduction.

    The unreachable part is removed first, then the unobservable part of
    what remains.  Only orthogonal projections are used, so modes far
    outside the unit circle do not swamp the rank decisions the way they
    would in a product of observability and reachability matrices.
    """
    n, m, p = R.n, R.m, R.p
    if n == 0:
        return R
    Q = _reachable_basis(R.A, R.B, tol_rank)
    A1, B1, C1 = Q.T @ R.A @ Q, Q.T @ R.B, R.C @ Q
    if A1.shape[0] == 0:
        return Realization(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((p, 0)), R.D)
    Q2 = _reachable_basis(A1.T, C1.T, tol_rank)
    if Q2.shape[1] == 0:
        return Realization(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((p, 0)), R.D)
    return Realization(Q2.T @ A1 @ Q2, Q2.T @ B1, C1 @ Q2, R.D)


def realize(M: RationalMatrix, tol_rank: float = TOL_RANK) -> Realization:
    """Minimal realization of a proper rational matrix.

    Each entry is put in controller canonical form; the block-diagonal
    union is then reduced by :func:`minimal_realization`.
    """
    p, m = M.shape
    blocks = []
    D = np.zeros((p, m))
    for i in range(p):
        for j in range(m):
            e = M[i, j]
            if e.is_zero():
                continue
            if not e.is_proper():
                raise ValueError(f"entry ({i},{j}) is improper and has no state-space realization")
            lead = e.den.lead
            num = np.real_if_close(e.num.coeffs / lead)
            den = np.real_if_close(e.den.coeffs / lead)
            k = len(den) - 1
            numk = np.zeros(k + 1)
            numk[: len(num)] = np.real(num)
            D[i, j] = numk[k]
            if k == 0:
                continue
            rem = numk[:k] - numk[k] * np.real(den[:k])
            A = np.zeros((k, k))
            A[0, :] = -np.real(den[:k][::-1])
            A[1:, :-1] = np.eye(k - 1)
            blocks.append((i, j, A, rem[::-1]))
    n = sum(b[2].shape[0] for b in blocks)
    A = np.zeros((n, n))
    B = np.zeros((n, m))
    C = np.zeros((p, n))
    k = 0
    for i, j, Ab, c in blocks:
        d = Ab.shape[0]
        A[k : k + d, k : k + d] = Ab
        B[k, j] = 1.0
        C[i, k : k + d] = c
        k += d
    return minimal_realization(Realization(A, B, C, D), tol_rank)


def mcmillan_poles(M: RationalMatrix, tol_rank: float = TOL_RANK) -> np.ndarray:
    """Poles of a proper rational matrix, counted with McMillan multiplicity."""
    Rm = realize(M, tol_rank)
    return np.linalg.eigvals(Rm.A) if Rm.n else np.zeros(0, complex)
