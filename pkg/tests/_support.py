"""Shared helpers for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from lowrankfb.harness.modelio import load_model
from lowrankfb.ratcore import Polynomial, RationalFunction
from lowrankfb.ssreal import Realization

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture(name):
    return load_model(FIXTURES / f"{name}.json")


def rf(num_desc, den_desc=(1.0,)):
    """Rational function from descending-power coefficient lists."""
    return RationalFunction(Polynomial(list(num_desc)[::-1]), Polynomial(list(den_desc)[::-1]))


def monic_coeffs(r: RationalFunction):
    """Ascending (num, den) coefficients after making den monic."""
    lead = r.den.lead
    return np.asarray(r.num.coeffs) / lead, np.asarray(r.den.coeffs) / lead


def rel_coeff_error(r: RationalFunction, expected: RationalFunction) -> float:
    """Largest coefficient deviation after monic normalization, relative to the largest coefficient."""
    n1, d1 = monic_coeffs(r)
    n2, d2 = monic_coeffs(expected)
    if len(n1) != len(n2) or len(d1) != len(d2):
        return float("inf")
    scale = max(np.max(np.abs(n2)), np.max(np.abs(d2)), 1e-300)
    return float(max(np.max(np.abs(n1 - n2)), np.max(np.abs(d1 - d2))) / scale)


def random_model(rng, kind: str, max_dim: int = 4) -> Realization:
    """Stable random spectral factor with ``rank(D)`` set by ``kind``.

    ``kind`` is ``"zero"``, ``"full"`` or ``"mixed"``.  The state dimension
    is large enough for an admissible split to exist.
    """
    while True:
        p = int(rng.integers(2, max_dim + 1))
        m = int(rng.integers(1, p))
        if kind == "zero":
            rho = 0
        elif kind == "full":
            rho = m
        else:
            if m < 2:
                continue
            rho = int(rng.integers(1, m))
        lo = max(1, m - rho)
        n = int(rng.integers(lo, max_dim + 1))
        break
    A = rng.normal(size=(n, n))
    A *= rng.uniform(0.3, 0.9) / max(np.max(np.abs(np.linalg.eigvals(A))), 1e-9)
    B = rng.normal(size=(n, m))
    C = rng.normal(size=(p, n))
    if rho:
        D = rng.normal(size=(p, rho)) @ rng.normal(size=(rho, m))
    else:
        D = np.zeros((p, m))
    return Realization(A, B, C, D)


def corpus(count: int = 50, seed: int = 2024):
    rng = np.random.default_rng(seed)
    kinds = ("zero", "full", "mixed")
    return [random_model(rng, kinds[i % 3]) for i in range(count)]
