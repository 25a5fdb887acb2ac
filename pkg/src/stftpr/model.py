"""Core domain types: instance configuration, support sets, global-phase comparison.

Signals and windows are plain 1-d complex ndarrays of length ``n``; every index
is cyclic with canonical representative in ``[0, n)``.  Reconstruction is only
ever defined modulo a global phase, so signal comparisons go through
:func:`phase_distance` rather than plain norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionMismatchError, InvalidWindowError

DEFAULT_ZERO_TOL = 1e-12
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ProblemConfig:
    """Instance geometry shared by the whole pipeline.

    Parameters
    ----------
    n : int
        Signal (and window) length.
    hop : int
        Separation between adjacent short-time sections; must divide ``n``.
    num_windows : int
        Number of windows in the measurement family.
    zero_tol : float
        Relative tolerance for declaring an entry zero: an index belongs to
        the support iff its magnitude exceeds ``zero_tol`` times the largest
        magnitude of the vector.
    """

    n: int
    hop: int
    num_windows: int
    zero_tol: float = DEFAULT_ZERO_TOL

    def __post_init__(self):
        if self.n <= 0:
            raise ConfigurationError(f"signal length must be positive, got {self.n}")
        if self.hop <= 0:
            raise ConfigurationError(f"hop must be positive, got {self.hop}")
        if self.num_windows <= 0:
            raise ConfigurationError(
                f"window count must be positive, got {self.num_windows}"
            )
        if self.n % self.hop != 0:
            raise ConfigurationError(
                f"hop {self.hop} does not divide signal length {self.n}"
            )
        if self.zero_tol < 0:
            raise ConfigurationError(f"zero_tol must be nonnegative, got {self.zero_tol}")

    @property
    def num_hops(self) -> int:
        """Number of short-time sections, ``n // hop``."""
        return self.n // self.hop


@dataclass(frozen=True)
class GlobalPhaseDistance:
    """Result of comparing two signals modulo a global phase rotation.

    ``distance`` is the l2 norm of ``x - exp(1j * aligning_phase) * y`` at the
    optimal phase; ``aligning_phase`` is canonicalized to ``[0, 2*pi)``.
    """

    distance: float
    aligning_phase: float


def as_signal(x, n: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 1-d complex array, optionally checking its length."""
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-d signal, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatchError(f"expected length {n}, got {arr.shape[0]}")
    return arr


def as_window_family(windows, n: int | None = None) -> np.ndarray:
    """Coerce to a (num_windows, n) complex array, rejecting all-zero rows."""
    fam = np.asarray(windows, dtype=complex)
    if fam.ndim == 1:
        fam = fam[None, :]
    if fam.ndim != 2 or fam.shape[0] == 0:
        raise DimensionMismatchError(
            f"expected a (num_windows, n) window family, got shape {fam.shape}"
        )
    if n is not None and fam.shape[1] != n:
        raise DimensionMismatchError(
            f"windows have length {fam.shape[1]}, expected {n}"
        )
    for r in range(fam.shape[0]):
        if not np.any(fam[r]):
            raise InvalidWindowError(f"window {r} is identically zero")
    return fam


def support(x, zero_tol: float = DEFAULT_ZERO_TOL) -> tuple[int, ...]:
    """Indices whose magnitude exceeds ``zero_tol`` relative to the peak.

    The threshold scales with the largest magnitude so the support set is
    invariant under nonzero rescaling.  An all-zero signal has empty support.
    """
    arr = as_signal(x)
    if arr.size == 0:
        return ()
    mags = np.abs(arr)
    peak = float(mags.max())
    if peak == 0.0:
        return ()
    return tuple(int(i) for i in np.flatnonzero(mags > zero_tol * peak))


def phase_distance(x, y) -> GlobalPhaseDistance:
    """Distance between two signals modulo a global phase rotation of ``y``.

    Minimizes ``||x - exp(1j*theta) * y||`` over theta.  The minimizer is the
    phase of the inner product ``<y, x>``, so no search is needed; a zero
    inner product leaves ``theta = 0``.
    """
    xa = as_signal(x)
    ya = as_signal(y, xa.shape[0])
    inner = np.vdot(ya, xa)  # sum over conj(y) * x
    theta = 0.0 if inner == 0 else float(np.angle(inner))
    dist = float(np.linalg.norm(xa - np.exp(1j * theta) * ya))
    return GlobalPhaseDistance(distance=dist, aligning_phase=theta % TWO_PI)
