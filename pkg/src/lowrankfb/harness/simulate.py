"""Monte-Carlo sample paths and empirical spectral checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from ..errors import UnstableA
from ..ratcore import RationalMatrix
from ..ssreal import Realization

RNG_NAME = "numpy.random.PCG64"
SPECTRUM_TOL = 0.15
CROSS_TOL = 0.2


@dataclass(frozen=True)
class SimConfig:
    """Horizon, burn-in, seed and Welch window count."""

    T: int = 2 ** 16
    burn_in: int = 1000
    seed: int = 0
    windows: int = 64

    def __post_init__(self):
        if self.T <= 0 or self.burn_in < 0:
            raise ValueError("T must be positive and burn_in non-negative")
        if self.T <= self.burn_in:
            raise ValueError("T must exceed the burn-in length")
        if self.windows < 1:
            raise ValueError("windows must be >= 1")


def simulate(R: Realization, cfg: SimConfig) -> np.ndarray:
    """Sample path of ``x(t+1) = A x + B w``, ``zeta = C x + D w`` from ``x(0) = 0``.

    Returns an array of shape ``(T, p)``; the first ``burn_in`` steps are
    run and discarded.
    """
    rad = R.spectral_radius
    if not rad < 1:
        raise UnstableA(f"A is not a stability matrix (spectral radius {rad:.6g})", radius=rad)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    total = cfg.T + cfg.burn_in
    w = rng.standard_normal((total, R.m))
    if R.n == 0:
        out = w @ R.D.T
        return out[cfg.burn_in:]
    Bw = w @ R.B.T
    x = np.zeros((total, R.n))
    xt = np.zeros(R.n)
    AT = R.A.T
    for t in range(total):
        x[t] = xt
        xt = xt @ AT + Bw[t]
    out = x @ R.C.T + w @ R.D.T
    return out[cfg.burn_in:]


def welch_matrix(paths: np.ndarray, windows: int = 64):
    """Two-sided Welch estimate of the spectral density matrix.

    Uses ``windows`` half-overlapping Hann segments.  Entry ``(i, j)``
    estimates ``sum_k E[zeta_i(t+k) zeta_j(t)] e^{-ik theta}``.

    Returns
    -------
    theta : ndarray
        Angular frequencies in ``[0, 2 pi)``.
    S : ndarray
        Shape ``(len(theta), p, p)``.
    """
    T, p = paths.shape
    nperseg = max(8, int(2 * T // (windows + 1)))
    S = None
    for i in range(p):
        for j in range(p):
            f, Pij = signal.csd(paths[:, j], paths[:, i], fs=1.0, window="hann", nperseg=nperseg,
                                noverlap=nperseg // 2, return_onesided=False, detrend=False)
            if S is None:
                S = np.empty((len(f), p, p), dtype=complex)
            S[:, i, j] = Pij
    theta = np.mod(2 * np.pi * f, 2 * np.pi)
    order = np.argsort(theta)
    return theta[order], S[order]


def _bands(theta, bands: int, edge: float):
    """Index groups for ``bands`` equal bands on ``(edge, pi - edge)``."""
    lo, hi = edge, np.pi - edge
    edges = np.linspace(lo, hi, bands + 1)
    groups = []
    for a, b in zip(edges[:-1], edges[1:]):
        idx = np.flatnonzero((theta >= a) & (theta < b))
        if idx.size:
            groups.append(idx)
    return groups


@dataclass
class SpectralCheck:
    max_relative_deviation: float
    passed: bool
    tolerance: float
    bands: int
    cross_max_relative_deviation: float | None = None
    cross_passed: bool | None = None
    cross_tolerance: float = CROSS_TOL
    eigenvalue_ratio: float = 0.0


def eigenvalue_ratio(paths: np.ndarray) -> float:
    """``lambda_2 / lambda_1`` of the sample covariance."""
    cov = np.cov(paths, rowvar=False)
    ev = np.sort(np.linalg.eigvalsh(np.atleast_2d(cov)))[::-1]
    if ev.size < 2 or ev[0] <= 0:
        return 0.0
    return float(ev[1] / ev[0])


def spectral_check(paths: np.ndarray, Phi: RationalMatrix, cfg: SimConfig, F: RationalMatrix | None = None,
                   m: int | None = None, bands: int = 32, edge: float = 0.05) -> SpectralCheck:
    """Compare band-averaged Welch estimates with the exact density.

    Relative deviation in a band is ``||S_hat - S||_F / ||S||_F`` for the
    band averages.  With ``F`` and ``m`` given, ``S_yu S_u^{-1}`` from the
    estimate is also compared with F at the band centres.
    """
    theta, S = welch_matrix(paths, cfg.windows)
    exact = Phi(np.exp(1j * theta))
    devs = []
    cross = []
    for idx in _bands(theta, bands, edge):
        Sh = S[idx].mean(axis=0)
        Se = exact[idx].mean(axis=0)
        devs.append(np.linalg.norm(Sh - Se) / max(np.linalg.norm(Se), 1e-300))
        if F is not None and m:
            Fh = Sh[m:, :m] @ np.linalg.inv(Sh[:m, :m])
            Fe = F(np.exp(1j * theta[idx])).mean(axis=0)
            cross.append(np.linalg.norm(Fh - Fe) / max(np.linalg.norm(Fe), 1e-300))
    dmax = float(max(devs)) if devs else 0.0
    out = SpectralCheck(dmax, dmax <= SPECTRUM_TOL, SPECTRUM_TOL, len(devs), eigenvalue_ratio=eigenvalue_ratio(paths))
    if cross:
        out.cross_max_relative_deviation = float(max(cross))
        out.cross_passed = out.cross_max_relative_deviation <= CROSS_TOL
    return out


def write_csv(path, paths: np.ndarray, labels) -> None:
    """Header row of labels, one row per step, 12 significant digits."""
    with open(path, "w") as fh:
        fh.write(",".join(labels) + "\n")
        for row in paths:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
