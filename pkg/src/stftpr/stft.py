"""Forward measurement synthesis: hop-sampled windowed DFTs and their magnitudes.

The canonical measurement object is the *squared* magnitude grid indexed by
(window, hop, frequency).  Squares, not magnitudes, are what every downstream
formula consumes, and storing them avoids a lossy sqrt/square round trip when
noise is added.  Noise tensors are always caller-supplied; the library draws
no randomness of its own.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DimensionMismatchError, InvalidWindowError
from .model import DEFAULT_ZERO_TOL, as_signal, as_window_family
from .supportgraph import window_support


def stft(x, w, hop: int) -> np.ndarray:
    """Hop-sampled windowed DFT of ``x`` against the cyclically shifted window.

    Returns a ``(n // hop, n)`` complex array whose ``[m, k]`` entry is
    ``(1/n) * sum_t x(t) w(hop*m - t) exp(-2j*pi*k*t/n)``, with the window
    argument reduced mod ``n``.  The ``1/n`` factor sits on this forward
    transform; there is no zero padding.
    """
    xa = as_signal(x)
    n = xa.shape[0]
    wa = as_signal(w, n)
    if hop <= 0 or n % hop != 0:
        raise ConfigurationError(f"hop {hop} does not divide signal length {n}")
    if not np.any(wa):
        raise InvalidWindowError("window is identically zero")
    num_hops = n // hop
    flipped = np.roll(wa[::-1], 1)  # flipped[t] = w(-t mod n)
    shifts = (np.arange(n)[None, :] - hop * np.arange(num_hops)[:, None]) % n
    sections = xa[None, :] * flipped[shifts]  # sections[m, t] = x(t) w(hop*m - t)
    return np.fft.fft(sections, axis=1) / n


@dataclass(frozen=True)
class MeasurementGrid:
    """Squared STFT magnitudes indexed by (window, hop, frequency).

    ``noise_level`` is the worst-case entrywise perturbation bound: 0 for
    exact data.  Noisy grids may contain small negative entries, bounded
    below by ``-noise_level``.
    """

    values: np.ndarray
    noise_level: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 3:
            raise DimensionMismatchError(
                f"expected (windows, hops, frequencies) grid, got shape {vals.shape}"
            )
        if self.noise_level < 0:
            raise ConfigurationError("noise_level must be nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def num_windows(self) -> int:
        return self.values.shape[0]

    @property
    def num_hops(self) -> int:
        return self.values.shape[1]

    @property
    def n(self) -> int:
        return self.values.shape[2]

    @property
    def hop(self) -> int:
        return self.n // self.num_hops


def measure(x, windows, hop: int) -> MeasurementGrid:
    """Exact squared-magnitude measurements of the multiple-window STFT."""
    xa = as_signal(x)
    fam = as_window_family(windows, xa.shape[0])
    vals = np.stack([np.abs(stft(xa, w, hop)) ** 2 for w in fam])
    return MeasurementGrid(values=vals, noise_level=0.0)


def corrupt(grid: MeasurementGrid, eps) -> MeasurementGrid:
    """Add an entrywise noise tensor and account for its worst-case level.

    The new level is the old one plus ``max |eps|``, so corrupting an exact
    grid records exactly the perturbation bound of ``eps``.
    """
    e = np.asarray(eps, dtype=float)
    if e.shape != grid.values.shape:
        raise DimensionMismatchError(
            f"noise shape {e.shape} does not match grid shape {grid.values.shape}"
        )
    level = float(np.max(np.abs(e))) if e.size else 0.0
    return MeasurementGrid(values=grid.values + e, noise_level=grid.noise_level + level)


@dataclass(frozen=True)
class AggregateMeasurements:
    """The two per-(window, hop) statistics the reconstruction consumes.

    ``energy[r, m]`` sums the grid over frequency (total energy of the m-th
    windowed section).  ``correlation[r, m]`` applies the modulation
    ``exp(2j*pi*k*span/n)`` with span = supporting length of window r minus
    one, which is the circular autocorrelation of the windowed section at
    that lag; its phase carries the relative phase of the two support-interval
    endpoints.  One real energy plus one complex correlation per (window, hop)
    is what the compressed reconstruction path consumes.
    """

    energy: np.ndarray
    correlation: np.ndarray
    noise_level: float = 0.0

    def __post_init__(self):
        en = np.asarray(self.energy, dtype=float)
        co = np.asarray(self.correlation, dtype=complex)
        if en.ndim != 2 or co.shape != en.shape:
            raise DimensionMismatchError(
                f"aggregate shapes disagree: {en.shape} vs {co.shape}"
            )
        object.__setattr__(self, "energy", en)
        object.__setattr__(self, "correlation", co)

    @property
    def num_windows(self) -> int:
        return self.energy.shape[0]

    @property
    def num_hops(self) -> int:
        return self.energy.shape[1]

    @property
    def measurement_count(self) -> int:
        """Number of aggregate measurements: two per (window, hop)."""
        return 2 * self.energy.shape[0] * self.energy.shape[1]


def aggregate(
    grid: MeasurementGrid, windows, zero_tol: float = DEFAULT_ZERO_TOL
) -> AggregateMeasurements:
    """Collapse a measurement grid to per-(window, hop) energy and correlation."""
    fam = as_window_family(windows, grid.n)
    if fam.shape[0] != grid.num_windows:
        raise DimensionMismatchError(
            f"grid has {grid.num_windows} windows, family has {fam.shape[0]}"
        )
    n = grid.n
    energy = grid.values.sum(axis=2)
    correlation = np.empty(energy.shape, dtype=complex)
    k = np.arange(n)
    for r in range(fam.shape[0]):
        span = window_support(fam[r], zero_tol).length - 1
        correlation[r] = grid.values[r] @ np.exp(2j * np.pi * k * span / n)
    return AggregateMeasurements(
        energy=energy, correlation=correlation, noise_level=grid.noise_level
    )


def _meta_path(path: Path) -> Path:
    return path.with_suffix(".meta.json")


def write_grid_csv(grid: MeasurementGrid, path, hop: int | None = None) -> None:
    """Write a grid as ``r,m,k,value`` CSV plus a sibling ``.meta.json``.

    Rows are sorted lexicographically by (r, m, k); values use shortest
    round-trip float repr so identical grids produce byte-identical files.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "m", "k", "value"])
        for r in range(grid.num_windows):
            for m in range(grid.num_hops):
                for k in range(grid.n):
                    writer.writerow([r, m, k, repr(float(grid.values[r, m, k]))])
    meta = {
        "n": grid.n,
        "hop": int(hop) if hop is not None else grid.hop,
        "num_windows": grid.num_windows,
        "num_hops": grid.num_hops,
        "noise_level": float(grid.noise_level),
    }
    with _meta_path(path).open("w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_grid_csv(path) -> tuple[MeasurementGrid, int]:
    """Read a grid CSV and its sibling metadata; returns (grid, hop)."""
    path = Path(path)
    meta_file = _meta_path(path)
    if not meta_file.exists():
        raise ConfigurationError(f"missing grid metadata file {meta_file}")
    with meta_file.open() as fh:
        meta = json.load(fh)
    shape = (int(meta["num_windows"]), int(meta["num_hops"]), int(meta["n"]))
    values = np.zeros(shape, dtype=float)
    seen = 0
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["r", "m", "k", "value"]:
            raise ConfigurationError(f"unexpected grid CSV header {header!r} in {path}")
        for row in reader:
            r, m, k = int(row[0]), int(row[1]), int(row[2])
            values[r, m, k] = float(row[3])
            seen += 1
    if seen != values.size:
        raise ConfigurationError(
            f"grid CSV {path} has {seen} rows, expected {values.size}"
        )
    grid = MeasurementGrid(values=values, noise_level=float(meta["noise_level"]))
    return grid, int(meta["hop"])
