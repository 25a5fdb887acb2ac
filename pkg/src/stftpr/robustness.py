"""Worst-case stability constants, noise error budgets, and support thresholding.

All bounds here are deterministic worst-case statements driven by three
constants of the window family: its total l2 mass, the smallest endpoint
product over the supporting intervals, and the summed absolute mass of the
per-residue Gram inverses.  Given an entrywise noise level and the smallest
nonzero magnitude of the target signal, the budget says whether the noise is
admissible and, if so, bounds both the squared-magnitude error and the
per-entry phase error of the reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CertificationError,
    ConfigurationError,
    InvalidPriorError,
    UndefinedBudgetError,
)
from .model import DEFAULT_ZERO_TOL, as_signal, as_window_family, support
from .spectral import ModulationMatrices
from .supportgraph import window_support


@dataclass(frozen=True)
class StabilityConstants:
    """The three window-family constants entering the error bounds.

    ``window_l2``: sqrt of the total squared magnitude over all windows.
    ``min_endpoint_product``: smallest |w(anchor) * w(anchor + length - 1)|
    over the family (for length-1 windows the two endpoints coincide).
    ``gram_inverse_l1``: entrywise l1 mass of all per-residue Gram inverses.
    """

    window_l2: float
    min_endpoint_product: float
    gram_inverse_l1: float
    n: int

    def to_dict(self) -> dict:
        return {
            "W_norm2": self.window_l2,
            "W_star": self.min_endpoint_product,
            "A_norm1": self.gram_inverse_l1,
            "n": self.n,
        }


@dataclass(frozen=True)
class ErrorBudget:
    """Admissibility verdict and the two worst-case error bounds.

    ``magnitude_bound`` bounds ``| |x_noisy(t)|**2 - |x(t)|**2 |`` entrywise;
    ``phase_bound`` bounds the per-entry unit-phasor error after optimal
    global alignment.  ``admissible`` is inclusive at the boundary.
    """

    noise_level: float
    admissible: bool
    magnitude_bound: float
    phase_bound: float
    min_support_magnitude_sq: float

    def to_dict(self) -> dict:
        return {
            "noise_level": self.noise_level,
            "admissible": self.admissible,
            "magnitude_bound": self.magnitude_bound,
            "phase_bound": self.phase_bound,
            "min_support_magnitude_sq": self.min_support_magnitude_sq,
        }


@dataclass(frozen=True)
class ThresholdedEstimate:
    """Estimate with sub-threshold entries zeroed: exact support under admissible noise."""

    signal: np.ndarray
    threshold: float


def stability_constants(
    windows, mats: ModulationMatrices, zero_tol: float = DEFAULT_ZERO_TOL
) -> StabilityConstants:
    """Compute the three constants; requires a passing rank certificate.

    The Gram inverses are formed explicitly here (this is the one place the
    explicit inverse is the quantity of interest rather than a solver).
    """
    fam = as_window_family(windows)
    if not mats.certified:
        raise CertificationError(
            f"stability constants need certified matrices; failing residues "
            f"{list(mats.failing)}",
            failing=mats.failing,
        )
    n = fam.shape[1]
    window_l2 = float(np.sqrt(np.sum(np.abs(fam) ** 2)))
    endpoint_products = []
    for w in fam:
        ws = window_support(w, zero_tol)
        far = (ws.anchor + ws.length - 1) % n
        endpoint_products.append(abs(w[ws.anchor] * w[far]))
    gram_l1 = 0.0
    for a in mats.matrices:
        gram = a.conj().T @ a
        gram_l1 += float(np.sum(np.abs(np.linalg.inv(gram))))
    return StabilityConstants(
        window_l2=window_l2,
        min_endpoint_product=float(min(endpoint_products)),
        gram_inverse_l1=gram_l1,
        n=n,
    )


def error_budget(
    consts: StabilityConstants,
    noise_level: float,
    reference,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> ErrorBudget:
    """Evaluate the admissibility condition and both error bounds.

    ``reference`` is either the true signal (test mode: the minimum is taken
    over its detected support) or a positive scalar prior for the smallest
    nonzero magnitude (deployment mode, the same quantity the half-minimum
    support rule consumes).
    """
    if noise_level < 0:
        raise ConfigurationError("noise_level must be nonnegative")
    if np.isscalar(reference) and not isinstance(reference, (complex, np.complexfloating)):
        min_mag = float(reference)
        if min_mag <= 0:
            raise InvalidPriorError(
                f"minimum-magnitude prior must be positive, got {min_mag}"
            )
    else:
        x = as_signal(reference)
        supp = support(x, zero_tol)
        if not supp:
            raise UndefinedBudgetError("reference signal has empty support")
        min_mag = float(np.min(np.abs(x[list(supp)])))
    min_sq = min_mag * min_mag
    denom = 4.0 * consts.gram_inverse_l1 * consts.window_l2 ** 2
    admissible = bool(noise_level <= min_sq / denom)
    magnitude_bound = consts.gram_inverse_l1 * consts.window_l2 ** 2 * noise_level
    phase_bound = (
        2.0 * consts.n ** 3 * noise_level / (consts.min_endpoint_product * min_sq)
    )
    return ErrorBudget(
        noise_level=float(noise_level),
        admissible=admissible,
        magnitude_bound=float(magnitude_bound),
        phase_bound=float(phase_bound),
        min_support_magnitude_sq=min_sq,
    )


def threshold_support(estimate, min_support_magnitude: float) -> ThresholdedEstimate:
    """Zero every entry at or below half the smallest-magnitude prior.

    Under admissible noise the surviving index set equals the true support
    (and hence so does the endpoint graph built on it).
    """
    if min_support_magnitude is None or min_support_magnitude <= 0:
        raise InvalidPriorError(
            f"minimum-magnitude prior must be positive, got {min_support_magnitude}"
        )
    x = as_signal(estimate)
    threshold = 0.5 * float(min_support_magnitude)
    out = np.where(np.abs(x) <= threshold, 0.0 + 0.0j, x)
    return ThresholdedEstimate(signal=out, threshold=threshold)
