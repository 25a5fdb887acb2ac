"""Relative-phase extraction along endpoint-graph edges and the full pipeline.

For an endpoint-graph edge witnessed by (window r, hop m), the aggregate
correlation collapses to a single term:

    n * correlation[r, m] = x(n1) * conj(x(n2)) * w_r(a) * conj(w_r(a + l - 1))

with n1 = hop*m - a and n2 = n1 - (l - 1) (indices mod n, a and l the
window's anchor and supporting length).  The collapse needs l <= n/2:
longer windows make the endpoint product ambiguous, so that bound is hard
enforced before any edge phase is trusted.  Dividing out the window's
endpoint-product phase leaves the unit phasor of x(n1)*conj(x(n2)), and a
spanning-tree walk anchored at the smallest support index (phase 0 by
convention) assembles the full signal from the recovered magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CertificationError,
    DegenerateEdgeError,
    DimensionMismatchError,
    DisconnectedGraphError,
    InvalidPriorError,
)
from .model import ProblemConfig, as_window_family
from .spectral import MagnitudeSpectrum, ModulationMatrices, certify_rank, recover_magnitudes
from .stft import AggregateMeasurements, MeasurementGrid, aggregate
from .supportgraph import (
    SpanningTree,
    SupportGraphEdge,
    WindowSupport,
    endpoint_graph_from_support,
    spanning_tree,
    window_support,
)


@dataclass(frozen=True)
class EdgePhaseEvidence:
    """Relative phase of one edge, with the witness that produced it.

    ``n1``/``n2`` follow the endpoint convention above (n1 sees the window
    anchor, n2 the far endpoint).  ``evidence`` is the correlation value
    backing the edge; ``relative_phase`` is the unit phasor of
    ``x(n1) * conj(x(n2))``.
    """

    n1: int
    n2: int
    window: int
    hop_index: int
    evidence: complex
    window_phase: complex
    relative_phase: complex


@dataclass(frozen=True)
class ReconstructionResult:
    """Estimate with its global phase anchored at the root support index.

    The estimate is exactly zero off the detected support; ``root_vertex``
    (the smallest support index) carries phase 0 by convention.  Diagnostics
    include clamping residues, the weakest edge evidence used, tree depth,
    the witnesses consumed, and phase residuals of redundant (non-tree) edges.
    """

    estimate: np.ndarray
    root_vertex: int | None
    diagnostics: dict


def default_degenerate_tol(n: int, noise_level: float) -> float:
    """Evidence-magnitude floor below which an edge phase is meaningless.

    Entrywise noise of level eps can move a correlation value by at most
    n * eps, so evidence below that could have been produced by noise alone;
    the absolute term covers exact-data rounding.
    """
    return n * noise_level + 1e-12


def _witness_order(witnesses, magnitudes, rule):
    if callable(rule):
        return list(rule(list(witnesses), magnitudes))
    if rule == "max_evidence":
        order = sorted(
            range(len(witnesses)), key=lambda i: (-magnitudes[i], witnesses[i])
        )
        return [witnesses[i] for i in order]
    if rule == "lexicographic":
        return sorted(witnesses)
    raise ValueError(f"unknown witness rule {rule!r}")


def edge_phase(
    edge: SupportGraphEdge,
    agg: AggregateMeasurements,
    windows,
    witness_rule="max_evidence",
    degenerate_tol: float | None = None,
    supports: list[WindowSupport] | None = None,
) -> EdgePhaseEvidence:
    """Extract the relative phase of an endpoint-graph edge.

    Witnesses are tried in rule order ("max_evidence" prefers the largest
    correlation magnitude - the most noise-robust choice - with ties broken
    lexicographically); the first one whose evidence clears the degeneracy
    tolerance wins.  If none does, the edge is unusable at this noise level.
    """
    fam = as_window_family(windows)
    n = fam.shape[1]
    hop = n // agg.num_hops
    if supports is None:
        supports = [window_support(w) for w in fam]
    if degenerate_tol is None:
        degenerate_tol = default_degenerate_tol(n, agg.noise_level)
    usable = [(r, m) for (r, m) in edge.witnesses if supports[r].length >= 2]
    if not usable:
        raise DegenerateEdgeError(
            f"edge {edge.endpoints} has no witness with supporting length >= 2",
            endpoints=edge.endpoints,
        )
    magnitudes = [abs(agg.correlation[r, m]) for (r, m) in usable]
    for r, m in _witness_order(usable, magnitudes, witness_rule):
        value = complex(agg.correlation[r, m])
        if abs(value) <= degenerate_tol:
            continue
        ws = supports[r]
        n1 = (hop * m - ws.anchor) % n
        n2 = (n1 - (ws.length - 1)) % n
        if {n1, n2} != set(edge.endpoints):
            raise RuntimeError(
                f"witness ({r}, {m}) maps to ({n1}, {n2}), not edge {edge.endpoints}"
            )
        far = fam[r, (ws.anchor + ws.length - 1) % n]
        wp = far * np.conj(fam[r, ws.anchor])
        wp = wp / abs(wp)
        rel = wp * value / abs(value)
        return EdgePhaseEvidence(
            n1=n1,
            n2=n2,
            window=r,
            hop_index=m,
            evidence=value,
            window_phase=complex(wp),
            relative_phase=complex(rel),
        )
    raise DegenerateEdgeError(
        f"edge {edge.endpoints}: all witness evidence magnitudes are below "
        f"{degenerate_tol:.3e} (noise level {agg.noise_level:.3e})",
        endpoints=edge.endpoints,
    )


def propagate(
    tree: SpanningTree,
    magnitudes: MagnitudeSpectrum,
    evidences: dict[tuple[int, int], EdgePhaseEvidence],
    support_set,
) -> ReconstructionResult:
    """Walk the spanning tree, assigning each vertex its accumulated phasor.

    The root gets phase 0.  Crossing an edge multiplies by the relative
    phase or its conjugate depending on whether the child plays the n1 or n2
    role in the edge's orientation - the bookkeeping that prevents silent
    conjugation when an edge is walked backwards.
    """
    amps = np.sqrt(magnitudes.magnitudes_sq)
    n = amps.shape[0]
    verts = tuple(sorted(int(v) for v in support_set))
    estimate = np.zeros(n, dtype=complex)
    if tree.root is None:
        if verts:
            raise RuntimeError("empty tree cannot span a nonempty support")
        return ReconstructionResult(
            estimate=estimate,
            root_vertex=None,
            diagnostics={"tree_depth": 0, "used_witnesses": [], "min_evidence": None},
        )
    phasor: dict[int, complex] = {tree.root: 1.0 + 0.0j}
    used = []
    min_evidence = None
    for te in tree.edges:
        ev = evidences[te.edge.endpoints]
        if {te.parent, te.child} != {ev.n1, ev.n2}:
            raise RuntimeError(
                f"evidence for {te.edge.endpoints} does not match tree edge "
                f"({te.parent}, {te.child})"
            )
        rel = ev.relative_phase
        phasor[te.child] = phasor[te.parent] * (rel if te.child == ev.n1 else np.conj(rel))
        used.append(
            {"n1": ev.n1, "n2": ev.n2, "window": ev.window, "hop_index": ev.hop_index}
        )
        mag = abs(ev.evidence)
        min_evidence = mag if min_evidence is None else min(min_evidence, mag)
    missing = [v for v in verts if v not in phasor]
    if missing:
        raise RuntimeError(f"tree does not span the support; unreached: {missing}")
    for v in verts:
        estimate[v] = amps[v] * phasor[v]
    return ReconstructionResult(
        estimate=estimate,
        root_vertex=tree.root,
        diagnostics={
            "tree_depth": tree.depth,
            "used_witnesses": used,
            "min_evidence": min_evidence,
        },
    )


def _detect_support(
    magnitudes: MagnitudeSpectrum,
    noise_level: float,
    zero_tol: float,
    min_support_magnitude: float | None,
) -> tuple[tuple[int, ...], str]:
    """Support of the recovered magnitudes.

    Exact data thresholds the squared magnitudes relative to their peak (the
    squared-domain analogue of the model-level rule, matching the noise floor
    of the linear-algebra path).  Noisy data uses the half-minimum rule and
    therefore needs the caller's prior on the smallest nonzero magnitude.
    """
    sq = magnitudes.magnitudes_sq
    if noise_level > 0.0:
        if min_support_magnitude is None or min_support_magnitude <= 0.0:
            raise InvalidPriorError(
                "noisy reconstruction needs a positive prior for the smallest "
                "nonzero magnitude (min_support_magnitude)"
            )
        keep = np.sqrt(sq) > 0.5 * min_support_magnitude
        return tuple(int(i) for i in np.flatnonzero(keep)), "half-minimum"
    peak = float(sq.max()) if sq.size else 0.0
    if peak == 0.0:
        return (), "relative-threshold"
    return (
        tuple(int(i) for i in np.flatnonzero(sq > zero_tol * peak)),
        "relative-threshold",
    )


def _run_pipeline(
    agg: AggregateMeasurements,
    fam: np.ndarray,
    cfg: ProblemConfig,
    mats: ModulationMatrices,
    min_support_magnitude: float | None,
    method: str,
    witness_rule,
    degenerate_tol: float | None,
) -> ReconstructionResult:
    supports = [window_support(w, cfg.zero_tol) for w in fam]
    magnitudes = recover_magnitudes(agg, mats, cfg, method=method)
    detected, rule = _detect_support(
        magnitudes, agg.noise_level, cfg.zero_tol, min_support_magnitude
    )
    diagnostics = {
        "support": list(detected),
        "support_rule": rule,
        "noise_level": agg.noise_level,
        "clamped_mass": magnitudes.clamped_mass,
        "imag_residue": magnitudes.imag_residue,
        "severe_clamping": magnitudes.severe_clamping,
    }
    if not detected:
        return ReconstructionResult(
            estimate=np.zeros(cfg.n, dtype=complex),
            root_vertex=None,
            diagnostics={
                **diagnostics,
                "tree_depth": 0,
                "used_witnesses": [],
                "min_evidence": None,
                "nontree_residuals": [],
            },
        )
    graph = endpoint_graph_from_support(
        detected, fam, cfg.hop, cfg.zero_tol, supports=supports
    )
    comps = graph.components()
    if len(comps) > 1:
        raise DisconnectedGraphError(
            f"endpoint graph on the detected support has {len(comps)} components: {comps}",
            components=comps,
        )
    # the endpoint-product collapse is only unambiguous for short windows
    too_long = [r for r, ws in enumerate(supports) if 2 * ws.length > cfg.n]
    if too_long:
        raise CertificationError(
            f"windows {too_long} have supporting length above half the signal "
            f"length; edge phases would be ambiguous",
            failing=too_long,
        )
    tree = spanning_tree(graph)
    evidences = {
        te.edge.endpoints: edge_phase(
            te.edge,
            agg,
            fam,
            witness_rule=witness_rule,
            degenerate_tol=degenerate_tol,
            supports=supports,
        )
        for te in tree.edges
    }
    result = propagate(tree, magnitudes, evidences, detected)
    result.diagnostics.update(diagnostics)
    tree_pairs = {te.edge.endpoints for te in tree.edges}
    unit = np.zeros(cfg.n, dtype=complex)
    on = result.estimate != 0
    unit[on] = result.estimate[on] / np.abs(result.estimate[on])
    residuals = []
    for edge in graph.edges:
        if edge.endpoints in tree_pairs:
            continue
        try:
            ev = edge_phase(
                edge, agg, fam,
                witness_rule=witness_rule,
                degenerate_tol=degenerate_tol,
                supports=supports,
            )
        except DegenerateEdgeError:
            residuals.append(
                {"n1": edge.endpoints[0], "n2": edge.endpoints[1], "residual": None}
            )
            continue
        residuals.append(
            {
                "n1": ev.n1,
                "n2": ev.n2,
                "window": ev.window,
                "hop_index": ev.hop_index,
                "residual": float(
                    abs(ev.relative_phase - unit[ev.n1] * np.conj(unit[ev.n2]))
                ),
            }
        )
    result.diagnostics["nontree_residuals"] = residuals
    return result


def reconstruct(
    grid: MeasurementGrid,
    windows,
    cfg: ProblemConfig,
    min_support_magnitude: float | None = None,
    method: str = "lstsq",
    witness_rule="max_evidence",
    rank_tol: float | None = None,
    degenerate_tol: float | None = None,
) -> ReconstructionResult:
    """Reconstruct a signal, up to a global phase, from a measurement grid.

    The three steps: recover squared magnitudes through the certified
    modulation matrices, build the endpoint graph on the detected support and
    verify connectivity, then extract edge phases and propagate them over a
    spanning tree.  Raises ``CertificationError`` when the window family
    fails the rank gate or has windows longer than half the signal,
    ``DisconnectedGraphError`` (carrying the component certificate) when the
    endpoint graph is disconnected, and ``DegenerateEdgeError`` when noise
    drowns out a needed edge.
    """
    fam = as_window_family(windows, cfg.n)
    if fam.shape[0] != cfg.num_windows:
        raise DimensionMismatchError(
            f"config expects {cfg.num_windows} windows, family has {fam.shape[0]}"
        )
    if grid.values.shape != (cfg.num_windows, cfg.num_hops, cfg.n):
        raise DimensionMismatchError(
            f"grid shape {grid.values.shape} does not match config "
            f"({cfg.num_windows}, {cfg.num_hops}, {cfg.n})"
        )
    mats = certify_rank(fam, cfg.hop, rank_tol)
    if not mats.certified:
        raise CertificationError(
            f"modulation matrices are rank-deficient at residues {list(mats.failing)}",
            failing=mats.failing,
        )
    agg = aggregate(grid, fam, cfg.zero_tol)
    return _run_pipeline(
        agg, fam, cfg, mats, min_support_magnitude, method, witness_rule, degenerate_tol
    )


def reconstruct_compressed(
    agg: AggregateMeasurements,
    windows,
    cfg: ProblemConfig,
    support_hint=None,
    min_support_magnitude: float | None = None,
    method: str = "lstsq",
    witness_rule="max_evidence",
    rank_tol: float | None = None,
    degenerate_tol: float | None = None,
) -> ReconstructionResult:
    """Reconstruct from the aggregate statistics alone.

    Consumes exactly ``2 * num_windows * n / hop`` measurements (one energy
    and one correlation per window and hop) and, on exact data, returns the
    same estimate as :func:`reconstruct` on the full grid.  The support is
    detected from the recovered magnitudes; ``support_hint`` is only
    cross-checked and reported, never trusted.
    """
    fam = as_window_family(windows, cfg.n)
    if fam.shape[0] != cfg.num_windows:
        raise DimensionMismatchError(
            f"config expects {cfg.num_windows} windows, family has {fam.shape[0]}"
        )
    if agg.energy.shape != (cfg.num_windows, cfg.num_hops):
        raise DimensionMismatchError(
            f"aggregate shape {agg.energy.shape} does not match config "
            f"({cfg.num_windows}, {cfg.num_hops})"
        )
    mats = certify_rank(fam, cfg.hop, rank_tol)
    if not mats.certified:
        raise CertificationError(
            f"modulation matrices are rank-deficient at residues {list(mats.failing)}",
            failing=mats.failing,
        )
    result = _run_pipeline(
        agg, fam, cfg, mats, min_support_magnitude, method, witness_rule, degenerate_tol
    )
    result.diagnostics["compressed_count"] = agg.measurement_count
    if support_hint is not None:
        hint = tuple(sorted(int(v) for v in support_hint))
        result.diagnostics["support_hint_matched"] = (
            hint == tuple(result.diagnostics["support"])
        )
    return result
