"""Feedback structure of rank-deficient stationary processes.

Given a spectral factor ``W(z) = C (zI - A)^{-1} B + D`` of a process
whose spectral density has rank ``m`` smaller than its size ``p``, the
package splits the components into an input part ``u`` and an output part
``y`` related by a deterministic map ``y = F u``, checks the stability of
F, synthesizes a feedback ``u = H y + r`` that makes the loop internally
stable, and builds network and factor models of the result.
"""

from .fconstruct import FResult, build_F, classify_causality, search_stable_F
from .hsynth import synthesize_diagonal, synthesize_scalar
from .ratcore import Polynomial, RationalFunction, RationalMatrix, UnitCircleGrid, simplify
from .specnet import closed_loop, f_from_spectra, factor_model, network_model, spectral_density
from .ssreal import Realization, normalize_D, partitions_with_nonsingular_C1B1, transfer_function

__version__ = "0.1.0"

__all__ = [
    "FResult", "Polynomial", "RationalFunction", "RationalMatrix", "Realization", "UnitCircleGrid",
    "build_F", "classify_causality", "closed_loop", "f_from_spectra", "factor_model", "network_model",
    "normalize_D", "partitions_with_nonsingular_C1B1", "search_stable_F", "simplify", "spectral_density",
    "synthesize_diagonal", "synthesize_scalar", "transfer_function",
]
