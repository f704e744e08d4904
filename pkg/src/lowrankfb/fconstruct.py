"""Construction of the deterministic map F from u to y.

Given a normalized spectral factor and an admissible partition, F is
realized as ``C2 (zI - Gamma1)^{-1} Bhat + Dhat`` and then reduced to a
minimal realization, whose dimension is the McMillan degree of F.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, InadmissiblePartition
from .ratcore import Polynomial, RationalFunction, RationalMatrix, UnitCircleGrid, rm_equal_on_grid
from .ssreal import (
    TOL_RANK, GammaPair, NormalizedFactor, OrderedPartition, Realization, gammas, is_admissible,
    is_strictly_stable, mcmillan_poles, minimal_realization, partitions_with_nonsingular_C1B1,
    transfer_function,
)

STABILITY_MARGIN = 1e-10
IDENTITY_TOL = 1e-8


@dataclass
class FResult:
    """F for one partition, with its poles, stability and degree.

    ``residuals`` holds grid checks of ``[-F I] W = 0`` (``left_kernel``),
    ``F Phi_u = Phi_yu`` (``spectral``) and the alternative ``z``-factor
    form of F1 (``f1_zform``), each relative to the size of ``W``.
    """

    F: RationalMatrix
    F0: RationalMatrix
    F1: RationalMatrix
    partition: OrderedPartition
    gammas: GammaPair
    poles: np.ndarray
    stable: bool
    marginal: bool
    mcmillan_degree: int
    realization: Realization
    residuals: dict = field(default_factory=dict)

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(self.poles))) if len(self.poles) else 0.0


def stacked_realization(N: NormalizedFactor, P: OrderedPartition, G: GammaPair | None = None) -> Realization:
    """The (generally non-minimal) realization ``(Gamma1, Bhat, C2, Dhat)`` of F."""
    G = G or gammas(N, P)
    n = N.n
    k = P.m - P.rho
    q = N.p - N.m
    if k:
        X = np.linalg.inv(P.C1B1)
        Pi = P.B1 @ X @ P.C1
        B1hat = G.Gamma1 @ P.B1 @ X
        D1hat = P.C2 @ P.B1 @ X
    else:
        Pi = np.zeros((n, n))
        B1hat = np.zeros((n, 0))
        D1hat = np.zeros((q, 0))
    if P.rho:
        B0hat = (np.eye(n) - Pi) @ P.B0 @ np.linalg.inv(N.Sigma)
    else:
        B0hat = np.zeros((n, 0))
    Bhat = np.hstack([B0hat, B1hat])
    Dhat = np.hstack([np.zeros((q, P.rho)), D1hat])
    return Realization(G.Gamma1, Bhat, P.C2, Dhat)


def permuted_factor(N: NormalizedFactor, P: OrderedPartition) -> Realization:
    return N.base.rows(P.perm)


def _identity_residuals(N, P, F: RationalMatrix, grid: UnitCircleGrid, G: GammaPair):
    pts = grid.points
    Wp = permuted_factor(N, P).evaluate(pts)
    m = N.m
    Fz = F(pts)
    scale = max(1.0, float(np.max(np.abs(Wp))))
    lk = Wp[:, m:, :] - Fz @ Wp[:, :m, :]
    Phi = Wp @ np.conj(np.swapaxes(Wp, 1, 2))
    sp = Fz @ Phi[:, :m, :m] - Phi[:, m:, :m]
    out = {
        "left_kernel": float(np.max(np.abs(lk))) / scale if lk.size else 0.0,
        "spectral": float(np.max(np.abs(sp))) / scale ** 2 if sp.size else 0.0,
    }
    k = P.m - P.rho
    if k and F.rows:
        X = np.linalg.inv(P.C1B1)
        n = N.n
        zf = np.array([z * P.C2 @ np.linalg.solve(z * np.eye(n) - G.Gamma1, P.B1 @ X) for z in pts])
        out["f1_zform"] = float(np.max(np.abs(zf - Fz[:, :, P.rho:]))) / scale
    return out


def _finish(N, P, G, Rf: Realization, F: RationalMatrix | None, grid, tol_rank) -> FResult:
    Rmin = minimal_realization(Rf, tol_rank)
    if F is None:
        F = transfer_function(Rmin)
    poles = np.linalg.eigvals(Rmin.A) if Rmin.n else np.zeros(0, complex)
    stable, rad = is_strictly_stable(Rmin.A, STABILITY_MARGIN)
    marginal = bool(len(poles)) and abs(rad - 1) <= STABILITY_MARGIN
    grid = grid or UnitCircleGrid.default()
    res = _identity_residuals(N, P, F, grid, G)
    return FResult(
        F=F, F0=F.select(range(F.rows), range(P.rho)), F1=F.select(range(F.rows), range(P.rho, P.m)),
        partition=P, gammas=G, poles=poles, stable=bool(stable), marginal=marginal,
        mcmillan_degree=Rmin.n, realization=Rmin, residuals=res,
    )


def _check(N, P, tol_rank):
    if not is_admissible(P, tol_rank):
        raise InadmissiblePartition(f"C1 B1 is singular for ordering {P.perm}")
    if P.rho and np.min(np.abs(np.diag(N.Sigma))) == 0:
        raise InadmissiblePartition("Sigma is singular")


def build_F(N: NormalizedFactor, P: OrderedPartition, grid: UnitCircleGrid | None = None,
            tol_rank: float = TOL_RANK) -> FResult:
    """F for the partition ``P`` from the stacked realization.

    Raises
    ------
    InadmissiblePartition
        If ``C1 B1`` is singular.
    """
    _check(N, P, tol_rank)
    G = gammas(N, P)
    return _finish(N, P, G, stacked_realization(N, P, G), None, grid, tol_rank)


def build_F_D_zero(N: NormalizedFactor, P: OrderedPartition, grid=None, tol_rank=TOL_RANK) -> FResult:
    """Route for ``D = 0``: ``F = z C2 (zI - Gamma1)^{-1} B (C1 B)^{-1}``.

    The factor ``z`` is applied to the rational form, so the pole at the
    origin cancels by simplification.  When ``m = n`` the result is the
    constant ``C2 C1^{-1}``.
    """
    if N.rho != 0:
        raise ValueError("build_F_D_zero requires D = 0")
    _check(N, P, tol_rank)
    G = gammas(N, P)
    X = np.linalg.inv(P.C1B1)
    if N.m == N.n:
        Fc = P.C2 @ np.linalg.inv(P.C1)
        F = RationalMatrix.constant(Fc) if Fc.size else RationalMatrix.zeros(*Fc.shape)
        Rf = Realization(np.zeros((0, 0)), np.zeros((0, N.m)), np.zeros((Fc.shape[0], 0)), Fc)
        return _finish(N, P, G, Rf, F, grid, tol_rank)
    base = transfer_function(Realization(G.Gamma1, P.B1 @ X, P.C2, np.zeros((P.C2.shape[0], N.m))))
    zpoly = RationalFunction(Polynomial([0.0, 1.0]))
    F = base.map(lambda e: e * zpoly)
    return _finish(N, P, G, stacked_realization(N, P, G), F, grid, tol_rank)


def build_F_D_fullrank(N: NormalizedFactor, P: OrderedPartition, grid=None, tol_rank=TOL_RANK) -> FResult:
    """Route for full-rank ``D``: ``F = C2 (zI - Gamma0)^{-1} B Sigma^{-1}``."""
    if N.rho != N.m:
        raise ValueError("build_F_D_fullrank requires rank(D) = m")
    _check(N, P, tol_rank)
    G = gammas(N, P)
    Rf = Realization(G.Gamma0, N.base.B @ np.linalg.inv(N.Sigma), P.C2, np.zeros((P.C2.shape[0], N.m)))
    return _finish(N, P, G, Rf, None, grid, tol_rank)


def search_stable_F(N: NormalizedFactor, grid=None, tol_rank=TOL_RANK):
    """Build F for every admissible ordering.

    Returns
    -------
    results : list of FResult
        In lexicographic order of the ``C1`` rows, with grid-equal
        duplicates removed.
    any_stable : bool
        False when there are no results (``p = m`` leaves no ``y``).
    """
    if N.p == N.m:
        return [], False
    grid = grid or UnitCircleGrid.default()
    results = []
    for P in partitions_with_nonsingular_C1B1(N, tol_rank):
        r = build_F(N, P, grid, tol_rank)
        if any(q.F.shape == r.F.shape and rm_equal_on_grid(q.F, r.F, grid, IDENTITY_TOL).equal for q in results):
            continue
        results.append(r)
    return results, any(r.stable for r in results)


def projector_diagonalizable(P: OrderedPartition, tol: float = 1e-8) -> bool:
    """Whether ``B1 (C1 B1)^{-1} C1`` has a full set of eigenvectors.

    The matrix is idempotent, so this holds in exact arithmetic; the check
    guards against numerically inconsistent partitions.
    """
    k = P.m - P.rho
    if k == 0:
        return True
    Pi = P.B1 @ np.linalg.solve(P.C1B1, P.C1)
    n = Pi.shape[0]
    # sum of geometric multiplicities over clustered eigenvalues
    distinct = []
    for lam in np.linalg.eigvals(Pi):
        if all(abs(lam - d) > 1e-6 for d in distinct):
            distinct.append(lam)
    scale = max(1.0, np.linalg.norm(Pi, 2))
    total = 0
    for lam in distinct:
        s = np.linalg.svd(Pi - lam * np.eye(n), compute_uv=False)
        total += int(np.sum(s <= tol * scale))
    return total == n


@dataclass(frozen=True)
class CausalityVerdict:
    granger_u_to_y: bool
    feedback_y_to_u: bool | None


def is_identically_zero(M: RationalMatrix, scale: float = 0.0, grid=None) -> bool:
    grid = grid or UnitCircleGrid.default()
    if M.rows == 0 or M.cols == 0:
        return True
    pts = grid.points
    poles = M.poles()
    if poles.size:
        pts = pts[np.min(np.abs(pts[:, None] - poles[None, :]), axis=1) > 1e-6]
    return M.max_modulus(pts) <= 1e-10 * (1 + scale)


def classify_causality(F: RationalMatrix, H: RationalMatrix | None = None, scale: float = 0.0,
                       grid=None) -> CausalityVerdict:
    """Granger causality from u to y, and feedback from y to u.

    ``scale`` is the size of W used in the zero threshold
    ``1e-10 * (1 + scale)``.  With ``H`` absent the feedback flag is None.

    Raises
    ------
    ContractViolation
        If ``H`` vanishes while F is not strictly stable.
    """
    granger = not is_identically_zero(F, scale, grid)
    if H is None:
        return CausalityVerdict(granger, None)
    feedback = not is_identically_zero(H, scale, grid)
    if not feedback and granger:
        poles = mcmillan_poles(F)
        if len(poles) and np.max(np.abs(poles)) >= 1 - STABILITY_MARGIN:
            raise ContractViolation("H is zero but F is not strictly stable; the loop cannot be internally stable")
    return CausalityVerdict(granger, feedback)
