"""Simplicial stochastic block model and the two triangle-homophily sweeps.

A sample is built in two stages: independent Bernoulli edges with
probability ``p1`` inside a community and ``q1`` across, then every closed
triangle of the realized graph is filled with probability ``p2`` if its
three nodes share a community and ``q2`` otherwise.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass

import numpy as np

from .complex import ClassLabeling, SimplicialComplex, potential_simplices
from .errors import DomainError, SimphomError
from .homophily import hypergraph_score, simplicial_score

__all__ = [
    "DESK_SIZES",
    "PAPER_SIZES",
    "SsbmParams",
    "SsbmSample",
    "SweepPoint",
    "fill_probabilities",
    "generate",
    "keyed_uniform",
    "sweep_experiment_left",
    "sweep_experiment_right",
    "temporal_stream",
]

DESK_SIZES = (200, 200)
PAPER_SIZES = (1000, 1000)
# cross-community edge probability; p1 is a multiple of this in both panels
DESK_Q1 = 0.025
PAPER_Q1 = 0.005

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class SsbmParams:
    community_sizes: tuple[int, ...]
    p1: float
    q1: float
    p2: float
    q2: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "community_sizes", tuple(int(s) for s in self.community_sizes))
        for name in ("p1", "q1", "p2", "q2"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"{name}={p} is not a probability")
        if any(s < 0 for s in self.community_sizes) or sum(self.community_sizes) == 0:
            raise DomainError("need at least one nonempty community and no negative sizes")


@dataclass(frozen=True)
class SsbmSample:
    complex: SimplicialComplex
    labeling: ClassLabeling
    params: SsbmParams

    @property
    def closed_triangles(self) -> np.ndarray:
        return potential_simplices(self.complex, 2)


# splitmix64 finalizer; keyed draws make the fill of a triangle independent of
# enumeration order
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)


def _mix(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def keyed_uniform(seed: int, keys: np.ndarray) -> np.ndarray:
    """Deterministic U[0,1) value per row of ``keys`` (sorted triangle ids)."""
    with np.errstate(over="ignore"):
        h = _mix(np.full(len(keys), np.uint64(seed & 0xFFFFFFFFFFFFFFFF)) + _GOLD)
        for col in np.asarray(keys, dtype=np.uint64).T:
            h = _mix(h ^ (col + _GOLD + (h << np.uint64(6)) + (h >> np.uint64(2))))
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def generate(params: SsbmParams) -> SsbmSample:
    sizes = params.community_sizes
    n = sum(sizes)
    comm = np.repeat(np.arange(len(sizes)), sizes)
    rng = np.random.default_rng(params.seed)
    iu, ju = np.triu_indices(n, 1)
    same = comm[iu] == comm[ju]
    prob = np.where(same, params.p1, params.q1)
    keep = rng.random(len(iu)) < prob
    edges = np.column_stack([iu[keep], ju[keep]])
    graph = SimplicialComplex.from_closed_arrays(n, {1: edges})

    tris = potential_simplices(graph, 2)
    if len(tris):
        lab = comm[tris]
        hom = (lab[:, 0] == lab[:, 1]) & (lab[:, 1] == lab[:, 2])
        fill_p = np.where(hom, params.p2, params.q2)
        filled = tris[keyed_uniform(params.seed, tris) < fill_p]
    else:
        filled = tris
    # filled triangles are closed triangles of the graph, so closure already holds
    cx = SimplicialComplex.from_closed_arrays(n, {1: edges, 2: filled})
    labeling = ClassLabeling(comm, tuple(range(max(len(sizes), 2))))
    return SsbmSample(cx, labeling, params)


def temporal_stream(sample: SsbmSample, seed: int = 0):
    """Timestamped record stream for a sample.

    Every edge becomes a record at an independent U[0,1) time. Every filled
    triangle becomes a record at a time uniform between its latest edge and
    1, so groups form on top of existing ties. Records are returned in time
    order.
    """
    from .linkpred import TimestampedSimplex

    cx = sample.complex
    rng = np.random.default_rng(seed)
    edges = cx.simplex_array(1)
    tris = cx.simplex_array(2)
    edge_times = rng.random(len(edges))
    when = {tuple(e): t for e, t in zip(edges.tolist(), edge_times.tolist())}
    latest = np.array([max(when[(a, b)], when[(a, c)], when[(b, c)]) for a, b, c in tris.tolist()])
    tri_times = latest + (1.0 - latest) * rng.random(len(tris))
    records = [tuple(e) for e in edges.tolist()] + [tuple(t) for t in tris.tolist()]
    times = np.concatenate([edge_times, tri_times])
    order = np.argsort(times, kind="stable")
    return [TimestampedSimplex(records[i], float(times[i])) for i in order]


# --------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepPoint:
    ratio: float
    metric: str
    mean: float
    ci_lo: float
    ci_hi: float
    trials: int
    dropped: int = 0

    def as_dict(self):
        return asdict(self)


def _trial_seed(seed: int, panel: int, ratio_idx: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, panel, ratio_idx, trial]).generate_state(1)[0])


def _summarize(ratio, metric, values, dropped) -> SweepPoint:
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        return SweepPoint(ratio, metric, math.nan, math.nan, math.nan, 0, dropped)
    mean = float(v.mean())
    half = _Z95 * float(v.std(ddof=1)) / math.sqrt(len(v)) if len(v) > 1 else math.nan
    return SweepPoint(ratio, metric, mean, mean - half, mean + half, len(v), dropped)


def _run_sweep(panel: int, ratios, make_params, trials: int, seed: int) -> list[SweepPoint]:
    if trials < 2:
        raise DomainError("need at least two trials for a confidence interval")
    points = []
    for ri, ratio in enumerate(ratios):
        hyper, simp = [], []
        dropped = 0
        for trial in range(trials):
            sample = generate(make_params(ratio, _trial_seed(seed, panel, ri, trial)))
            try:
                h = hypergraph_score(sample.complex, sample.labeling, 3)
                s = simplicial_score(sample.complex, sample.labeling, 2)
            except SimphomError:
                dropped += 1
                continue
            hyper.append(float(h.score))
            simp.append(float(s.score))
        points.append(_summarize(float(ratio), "hypergraph", hyper, dropped))
        points.append(_summarize(float(ratio), "simplicial", simp, dropped))
    return points


def sweep_experiment_left(
    sizes: Sequence[int] = DESK_SIZES,
    q1: float = DESK_Q1,
    ratios: Sequence[float] = (0.5, 1.0, 2.0, 4.0, 8.0),
    fill: float = 0.5,
    trials: int = 30,
    seed: int = 0,
) -> list[SweepPoint]:
    """Vary p1/q1 with label-blind fills (p2 = q2 = ``fill``)."""

    def make(ratio, s):
        return SsbmParams(tuple(sizes), min(1.0, ratio * q1), q1, fill, fill, s)

    return _run_sweep(0, ratios, make, trials, seed)


def fill_probabilities(ratio: float, fill: float = 0.5) -> tuple[float, float]:
    """(p2, q2) with ``p2/q2 == ratio`` and the larger of the two equal to ``fill``."""
    if ratio <= 0:
        raise DomainError("fill ratio must be positive")
    return (fill, fill / ratio) if ratio >= 1 else (fill * ratio, fill)


def sweep_experiment_right(
    sizes: Sequence[int] = DESK_SIZES,
    q1: float = DESK_Q1,
    ratios: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 4.0),
    edge_ratio: float = 4.0,
    fill: float = 0.5,
    trials: int = 30,
    seed: int = 0,
) -> list[SweepPoint]:
    """Vary p2/q2 with homophilous edges (p1 = ``edge_ratio`` * q1)."""

    def make(ratio, s):
        p2, q2 = fill_probabilities(ratio, fill)
        return SsbmParams(tuple(sizes), min(1.0, edge_ratio * q1), q1, p2, q2, s)

    return _run_sweep(1, ratios, make, trials, seed)
