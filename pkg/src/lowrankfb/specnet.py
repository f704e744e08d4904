"""Spectral densities, closed loops, network models and factor models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlgebraicLoopSingular, RankDeficientU, SingularMatrix
from .ratcore import (
    Polynomial, RationalFunction, RationalMatrix, UnitCircleGrid, block, polymatrix_solve_right, rm_equal_on_grid,
    rm_inverse, simplify, vstack,
)
from .ssreal import (
    NormalizedFactor, OrderedPartition, Realization, minimal_realization, polynomial_form, realize, transfer_function,
)


@dataclass
class SpectralDensity:
    """``Phi(z) = W(z) W(1/z)^T`` and its blocks for a split ``m = dim u``."""

    Phi: RationalMatrix
    m: int
    num: list | None = None
    den: object | None = None

    @property
    def Phi_u(self):
        return self.Phi.select(range(self.m), range(self.m))

    @property
    def Phi_uy(self):
        return self.Phi.select(range(self.m), range(self.m, self.Phi.rows))

    @property
    def Phi_yu(self):
        return self.Phi.select(range(self.m, self.Phi.rows), range(self.m))

    @property
    def Phi_y(self):
        return self.Phi.select(range(self.m, self.Phi.rows), range(self.m, self.Phi.rows))


def spectral_density(W: RationalMatrix, m: int | None = None) -> SpectralDensity:
    """Exact rational ``W(z) W(1/z)^T``; ``m`` defaults to the column count of W.

    W must be proper; it is realized minimally first so that the density
    carries the polynomial form used by :func:`f_from_spectra`.
    """
    return spectral_density_from_realization(realize(W), W.cols if m is None else m)


def spectral_density_from_realization(R: Realization, m: int | None = None) -> SpectralDensity:
    """Spectral density of ``C (zI - A)^{-1} B + D``.

    Also keeps the exact common-denominator form
    ``Phi = N(z) N~(z)^T / (chi(z) chi~(z))`` where ``~`` reverses
    coefficients, i.e. ``N~(z) = z^n N(1/z)``.
    """
    Nw, chi = polynomial_form(R)
    n = R.n
    rev = [[e.reverse(n) if not e.is_zero() else Polynomial() for e in row] for row in Nw]
    p = R.p
    num = []
    for i in range(p):
        row = []
        for j in range(p):
            acc = Polynomial()
            for k in range(R.m):
                acc = acc + Nw[i][k] * rev[j][k]
            row.append(acc)
        num.append(row)
    den = chi * chi.reverse(n)
    Phi = RationalMatrix([[simplify(RationalFunction(e, den)) for e in row] for row in num], p, p)
    return SpectralDensity(Phi, R.m if m is None else m, num, den)


def phi_partition(N: NormalizedFactor, P: OrderedPartition) -> SpectralDensity:
    """Spectral density of the permuted normalized factor, split at ``m``."""
    return spectral_density_from_realization(N.base.rows(P.perm), N.m)


def grid_rank(Phi: RationalMatrix, grid: UnitCircleGrid | None = None, rtol: float = 1e-8):
    """Numerical rank of ``Phi(e^{i theta})`` at each grid point."""
    grid = grid or UnitCircleGrid.default()
    vals = Phi(grid.points)
    s = np.linalg.svd(vals, compute_uv=False)
    return np.sum(s > rtol * s[:, :1], axis=1)


def f_from_spectra(S: SpectralDensity) -> RationalMatrix:
    """``F = Phi_yu Phi_u^{-1}``.

    Raises
    ------
    RankDeficientU
        If ``det Phi_u`` vanishes identically.
    """
    m, p = S.m, S.Phi.rows
    try:
        if S.num is not None:
            Nu = [row[:m] for row in S.num[:m]]
            Nyu = [row[:m] for row in S.num[m:]]
            return RationalMatrix(polymatrix_solve_right(Nyu, Nu), p - m, m)
        inv = rm_inverse(S.Phi_u)
    except SingularMatrix as exc:
        raise RankDeficientU("Phi_u is singular: the chosen u is not of full rank") from exc
    return (S.Phi_yu @ inv).simplify()


# ---------------------------------------------------------------------------
# closed loop


@dataclass
class ClosedLoop:
    """Closed loop of ``y = F u`` and ``u = H y + r``.

    ``T = [[P, P H], [Q F, Q]]`` with ``P = (I - H F)^{-1}`` and
    ``Q = (I - F H)^{-1}``.
    """

    T: RationalMatrix
    P: RationalMatrix
    Q: RationalMatrix
    internally_stable: bool
    poles: np.ndarray
    residuals: dict = field(default_factory=dict)


def closed_loop_matrix(F: RationalMatrix, H: RationalMatrix):
    """State matrix of the interconnection of minimal realizations of F and H."""
    Rf, Rh = realize(F), realize(H)
    Df, Dh = Rf.D, Rh.D
    Ff = np.linalg.inv(np.eye(Dh.shape[0]) - Dh @ Df)
    # u = Ff (Dh Cf xf + Ch xh) + ...; y = Cf xf + Df u
    Af, Bf, Cf = Rf.A, Rf.B, Rf.C
    Ah, Bh, Ch = Rh.A, Rh.B, Rh.C
    Cu_f = Ff @ Dh @ Cf
    Cu_h = Ff @ Ch
    Cy_f = Cf + Df @ Cu_f
    Cy_h = Df @ Cu_h
    top = np.hstack([Af + Bf @ Cu_f, Bf @ Cu_h])
    bot = np.hstack([Bh @ Cy_f, Ah + Bh @ Cy_h])
    Acl = np.vstack([top, bot]) if top.size or bot.size else np.zeros((0, 0))
    return Acl


def closed_loop(F: RationalMatrix, H: RationalMatrix, grid: UnitCircleGrid | None = None) -> ClosedLoop:
    """Sensitivities, the loop matrix T, and internal stability.

    Internal stability is decided from the eigenvalues of the closed-loop
    state matrix built from minimal realizations of F and H, which covers
    all four blocks of T at once.

    Raises
    ------
    AlgebraicLoopSingular
        If ``I - F H`` is singular.
    """
    grid = grid or UnitCircleGrid.default()
    q, m = F.shape
    try:
        Q = rm_inverse(RationalMatrix.identity(q) - F @ H)
        P = rm_inverse(RationalMatrix.identity(m) - H @ F)
    except SingularMatrix as exc:
        raise AlgebraicLoopSingular("I - F H is singular") from exc
    T = block([[P, P @ H], [Q @ F, Q]])
    Df = realize(F).D
    Dh = realize(H).D
    if abs(np.linalg.det(np.eye(q) - Df @ Dh)) < 1e-12:
        raise AlgebraicLoopSingular("I - F(inf) H(inf) is singular: the loop is not well posed")
    Acl = closed_loop_matrix(F, H)
    poles = np.linalg.eigvals(Acl) if Acl.size else np.zeros(0, complex)
    stable = bool(np.all(np.abs(poles) < 1 - 1e-10))
    R = block([[RationalMatrix.identity(m), -H], [-F, RationalMatrix.identity(q)]])
    res = {
        "TR_identity": rm_equal_on_grid(T @ R, RationalMatrix.identity(m + q), grid).max_deviation,
        "QF_FP": rm_equal_on_grid(Q @ F, F @ P, grid).max_deviation,
        "HQ_PH": rm_equal_on_grid(H @ Q, P @ H, grid).max_deviation,
    }
    return ClosedLoop(T, P, Q, stable, poles, res)


# ---------------------------------------------------------------------------
# network model


@dataclass
class NetworkModel:
    M: RationalMatrix
    N: RationalMatrix
    edges: list
    labels: list
    block_edges: dict
    residuals: dict = field(default_factory=dict)


def network_model(F: RationalMatrix, H: RationalMatrix, K: RationalMatrix, labels=None,
                  W_perm: RationalMatrix | None = None, grid=None, tol: float = 1e-10) -> NetworkModel:
    """``M = [[0, H], [F, 0]]`` and ``N = [K; 0]`` with the scalar edge list.

    An edge ``(j, i)`` records that node ``j`` drives node ``i``, i.e.
    entry ``M[i, j]`` is not identically zero.
    """
    grid = grid or UnitCircleGrid.default()
    q, m = F.shape
    p = m + q
    labels = list(labels) if labels else [f"u{i + 1}" for i in range(m)] + [f"y{i + 1}" for i in range(q)]
    M = block([[RationalMatrix.zeros(m, m), H], [F, RationalMatrix.zeros(q, q)]])
    Nm = vstack([K, RationalMatrix.zeros(q, K.cols)])
    pts = grid.points
    edges = []
    for i in range(p):
        for j in range(p):
            e = M[i, j]
            if e.is_zero():
                continue
            pl = e.poles()
            keep = pts if not len(pl) else pts[np.min(np.abs(pts[:, None] - pl[None, :]), axis=1) > 1e-6]
            if np.max(np.abs(e(keep))) > tol:
                edges.append((labels[j], labels[i]))
    blocks = {
        "u->y": sum(1 for a, b in edges if labels.index(a) < m <= labels.index(b)),
        "y->u": sum(1 for a, b in edges if labels.index(b) < m <= labels.index(a)),
    }
    res = {}
    try:
        IM = rm_inverse(RationalMatrix.identity(p) - M)
    except SingularMatrix as exc:
        raise AlgebraicLoopSingular("I - M is singular") from exc
    cl = closed_loop(F, H, grid)
    res["inverse_equals_T"] = rm_equal_on_grid(IM, cl.T, grid).max_deviation
    if W_perm is not None:
        res["reproduces_W"] = rm_equal_on_grid(IM @ Nm, W_perm, grid, relative=True).max_deviation
    return NetworkModel(M, Nm, edges, labels, blocks, res)


# ---------------------------------------------------------------------------
# factor model


@dataclass
class FactorModel:
    """``W_perm = [I; F] Wu`` with ``Wu = C_u (zI - A)^{-1} B + D_u``."""

    Wu: RationalMatrix
    Wyu: RationalMatrix
    F: RationalMatrix
    Wu_realization: Realization
    residuals: dict = field(default_factory=dict)


def factor_model(N: NormalizedFactor, P: OrderedPartition, F: RationalMatrix, grid=None) -> FactorModel:
    grid = grid or UnitCircleGrid.default()
    m = N.m
    Cu = np.vstack([P.C0, P.C1])
    Du = N.base.D[list(P.perm[:m]), :]
    Ru = Realization(N.base.A, N.base.B, Cu, Du)
    Wu = transfer_function(minimal_realization(Ru))
    Wy = transfer_function(minimal_realization(Realization(N.base.A, N.base.B, P.C2, N.base.D[list(P.perm[m:]), :])))
    Wperm = vstack([Wu, Wy])
    I = RationalMatrix.identity(m)
    stacked = vstack([I, F]) @ Wu
    scale = max(1.0, Wperm.max_modulus(grid.points))
    res = {
        "stacking": rm_equal_on_grid(stacked, Wperm, grid).max_deviation / scale,
        "left_kernel": float(np.max(np.abs((F @ Wu - Wy)(grid.points)))) / scale if Wy.rows else 0.0,
    }
    return FactorModel(Wu, Wy, F, Ru, res)


def default_K(Wu: RationalMatrix, H: RationalMatrix | None = None, F: RationalMatrix | None = None):
    """Noise shaping ``K = P^{-1} Wu`` (``K = Wu`` when there is no feedback)."""
    if H is None or F is None:
        return Wu
    Pinv = RationalMatrix.identity(H.rows) - H @ F
    return (Pinv @ Wu).simplify()
