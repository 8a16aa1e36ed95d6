"""Homophily scores for groups: affinities, node baselines and skeleton baselines.

All ratios are computed as exact :class:`fractions.Fraction` values from
integer counts; reports expose float views for printing.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .complex import ClassLabeling, Hypergraph, SimplicialComplex, potential_simplices
from .errors import DomainError, UndefinedScoreError

__all__ = [
    "ScoreReport",
    "TypeProfile",
    "affinity",
    "graph_score",
    "hetero_hypergraph_baseline",
    "hetero_scores",
    "hetero_simplicial_baseline",
    "hypergraph_baseline",
    "hypergraph_score",
    "simplicial_baseline",
    "simplicial_score",
    "type_affinity",
]


@dataclass(frozen=True)
class ScoreReport:
    """Affinity / baseline / score triple with the counts behind it.

    ``score`` is ``math.inf`` (and ``flag == "infinite"``) when the baseline
    is zero but the affinity is not.
    """

    affinity: Fraction
    baseline: Fraction
    score: Fraction | float
    homogeneous: int
    total: int
    baseline_numerator: int
    baseline_denominator: int
    flag: str | None = None

    def as_dict(self) -> dict:
        return {
            "affinity": float(self.affinity),
            "baseline": float(self.baseline),
            "score": float(self.score),
            "homogeneous": self.homogeneous,
            "total": self.total,
            "baseline_numerator": self.baseline_numerator,
            "baseline_denominator": self.baseline_denominator,
            "flag": self.flag,
        }


@dataclass
class TypeProfile:
    """Per-t heterogeneous scores for one class and one group size.

    Lists are indexed by ``t - 1`` for ``t = 1..group_size``. Entries that
    are undefined hold ``None`` and ``t`` is listed in ``undefined``.
    The simplicial fields are ``None`` when the input was a plain hypergraph.
    """

    cls: object
    group_size: int
    counts: list[int]
    affinity: list[Fraction | None]
    hypergraph_baseline: list[Fraction]
    hypergraph_score: list[Fraction | float | None]
    simplicial_counts: list[int] | None = None
    simplicial_baseline: list[Fraction | None] | None = None
    simplicial_score: list[Fraction | float | None] | None = None
    undefined: dict[str, list[int]] = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = []
        for i in range(self.group_size):
            row = {
                "class": self.cls,
                "g": self.group_size,
                "t": i + 1,
                "count": self.counts[i],
                "affinity": _f(self.affinity[i]),
                "hypergraph_baseline": _f(self.hypergraph_baseline[i]),
                "hypergraph_score": _f(self.hypergraph_score[i]),
            }
            if self.simplicial_baseline is not None:
                row["simplicial_baseline"] = _f(self.simplicial_baseline[i])
                row["simplicial_score"] = _f(self.simplicial_score[i])
            out.append(row)
        return out


def _f(x):
    return None if x is None else float(x)


# --------------------------------------------------------------------------
# counting helpers


def _as_group_array(groups, size: int | None = None) -> np.ndarray:
    if isinstance(groups, np.ndarray):
        arr = groups
    else:
        groups = list(groups)
        if size is not None:
            groups = [g for g in groups if len(g) == size]
        elif groups and len({len(g) for g in groups}) > 1:
            raise DomainError("groups of mixed sizes; pass a group size")
        if not groups:
            return np.empty((0, size or 0), dtype=np.int64)
        arr = np.array([tuple(g) for g in groups], dtype=np.int64)
    if size is not None and arr.shape[1] != size:
        return np.empty((0, size), dtype=np.int64)
    return arr


def _label_rows(arr: np.ndarray, labeling: ClassLabeling) -> np.ndarray:
    if arr.size and arr.max() >= labeling.n:
        labeling.check_covers(int(arr.max()) + 1)
    return labeling.labels[arr]


def _homogeneous_count(arr: np.ndarray, labeling: ClassLabeling) -> tuple[int, int]:
    if len(arr) == 0:
        return 0, 0
    lab = _label_rows(arr, labeling)
    hom = int(np.count_nonzero((lab == lab[:, :1]).all(axis=1)))
    return hom, len(arr)


def _type_counts(arr: np.ndarray, labeling: ClassLabeling, ci: int, g: int) -> list[int]:
    """``out[t]`` = number of groups with exactly t members of class ``ci``, t = 0..g."""
    if len(arr) == 0:
        return [0] * (g + 1)
    t = (_label_rows(arr, labeling) == ci).sum(axis=1)
    return np.bincount(t, minlength=g + 1).tolist()


def _slot_distribution(counts: list[int], g: int) -> list[Fraction] | None:
    denom = sum(i * counts[i] for i in range(1, g + 1))
    if denom == 0:
        return None
    return [Fraction(t * counts[t], denom) for t in range(1, g + 1)]


def _groups_of(data, g: int) -> np.ndarray:
    if isinstance(data, SimplicialComplex):
        return data.simplex_array(g - 1)
    if isinstance(data, Hypergraph):
        edges = data.edges_of_size(g)
        if not edges:
            return np.empty((0, g), dtype=np.int64)
        return np.array(sorted(edges), dtype=np.int64)
    return _as_group_array(data, g)


def _ratio(num: int, den: int, what: str) -> Fraction:
    if den == 0:
        raise UndefinedScoreError(f"{what}: empty denominator")
    return Fraction(num, den)


def _divide(aff: Fraction, base: Fraction, what: str):
    if base == 0:
        if aff == 0:
            raise UndefinedScoreError(f"{what}: affinity and baseline are both zero")
        return math.inf, "infinite"
    return aff / base, None


# --------------------------------------------------------------------------
# homogeneous scores


def affinity(groups: Iterable, labeling: ClassLabeling) -> Fraction:
    """Fraction of ``groups`` whose members all share one class."""
    hom, total = _homogeneous_count(_as_group_array(groups), labeling)
    return _ratio(hom, total, "affinity")


def _node_baseline_counts(labeling: ClassLabeling, g: int) -> tuple[int, int]:
    n = labeling.n
    if g < 2:
        raise DomainError(f"group size must be >= 2, got {g}")
    if g > n:
        raise DomainError(f"group size {g} exceeds number of nodes {n}")
    return sum(math.comb(int(nc), g) for nc in labeling.class_counts), math.comb(n, g)


def hypergraph_baseline(labeling: ClassLabeling, g: int) -> Fraction:
    """Probability that a uniformly random g-subset of nodes is homogeneous."""
    num, den = _node_baseline_counts(labeling, g)
    return Fraction(num, den)


def hypergraph_score(data, labeling: ClassLabeling, g: int) -> ScoreReport:
    """Affinity of size-g groups over the node-labeling baseline.

    ``data`` may be a :class:`Hypergraph` (only hyperedges of exactly size g
    count), a :class:`SimplicialComplex` (its (g-1)-simplices), or a plain
    collection of groups.
    """
    arr = _groups_of(data, g)
    hom, total = _homogeneous_count(arr, labeling)
    if total == 0:
        raise UndefinedScoreError(f"no groups of size {g}")
    num, den = _node_baseline_counts(labeling, g)
    if num == 0:
        raise UndefinedScoreError(f"every class has fewer than {g} members; baseline is zero")
    aff, base = Fraction(hom, total), Fraction(num, den)
    return ScoreReport(aff, base, aff / base, hom, total, num, den)


def graph_score(data, labeling: ClassLabeling) -> ScoreReport:
    """Classical edge homophily: the size-2 hypergraph score."""
    return hypergraph_score(data, labeling, 2)


def _potential_homogeneous_counts(cx: SimplicialComplex, labeling: ClassLabeling, k: int):
    labeling.check_covers(cx.n_nodes)
    if k == 1:
        # every pair of nodes is a potential edge; count combinatorially
        counts = np.bincount(labeling.labels[: cx.n_nodes], minlength=labeling.m)
        return sum(math.comb(int(c), 2) for c in counts), math.comb(cx.n_nodes, 2)
    return _homogeneous_count(potential_simplices(cx, k), labeling)


def simplicial_baseline(cx: SimplicialComplex, labeling: ClassLabeling, k: int) -> Fraction:
    """Homogeneous fraction of potential k-simplices of the (k-1)-skeleton."""
    hom, total = _potential_homogeneous_counts(cx, labeling, k)
    return _ratio(hom, total, f"no potential {k}-simplices")


def simplicial_score(cx: SimplicialComplex, labeling: ClassLabeling, k: int) -> ScoreReport:
    """k-simplicial homophily: affinity of X^k over the skeleton-conditioned baseline."""
    if k < 1:
        raise DomainError("k must be >= 1")
    hom, total = _homogeneous_count(cx.simplex_array(k), labeling)
    if total == 0:
        raise UndefinedScoreError(f"complex has no {k}-simplices")
    b_hom, b_total = _potential_homogeneous_counts(cx, labeling, k)
    base = _ratio(b_hom, b_total, f"no potential {k}-simplices")
    aff = Fraction(hom, total)
    score, flag = _divide(aff, base, f"{k}-simplicial score")
    return ScoreReport(aff, base, score, hom, total, b_hom, b_total, flag)


# --------------------------------------------------------------------------
# heterogeneous (type-t) scores


def _check_t(t: int, g: int):
    if not 1 <= t <= g:
        raise DomainError(f"t must lie in 1..{g}, got {t}")


def type_affinity(groups, c, t: int, g: int, labeling: ClassLabeling) -> Fraction:
    """Share of class-c membership slots (in size-g groups) that sit in type-t groups.

    A type-t group has exactly t members of class c. Summed over t = 1..g
    the values add up to one.
    """
    _check_t(t, g)
    ci = labeling.class_index(c)
    counts = _type_counts(_groups_of(groups, g), labeling, ci, g)
    dist = _slot_distribution(counts, g)
    if dist is None:
        raise UndefinedScoreError(f"class {c!r} appears in no group of size {g}")
    return dist[t - 1]


def _hetero_node_baseline(n: int, nc: int, t: int, g: int) -> Fraction:
    if nc < 1 or t > nc or g - t > n - nc:
        return Fraction(0)
    return Fraction(math.comb(nc - 1, t - 1) * math.comb(n - nc, g - t), math.comb(n - 1, g - 1))


def hetero_hypergraph_baseline(labeling: ClassLabeling, c, t: int, g: int) -> Fraction:
    """Chance that a random size-g group around a fixed class-c node has exactly t class-c members.

    Hypergeometric: ``C(n_c-1, t-1) C(n-n_c, g-t) / C(n-1, g-1)``. This is
    the expected type-t affinity under random relabeling, so it sums to one
    over t.
    """
    _check_t(t, g)
    if g > labeling.n:
        raise DomainError(f"group size {g} exceeds number of nodes {labeling.n}")
    nc = int(labeling.class_counts[labeling.class_index(c)])
    return _hetero_node_baseline(labeling.n, nc, t, g)


def _potential_type_counts(cx: SimplicialComplex, labeling: ClassLabeling, ci: int, k: int) -> list[int]:
    labeling.check_covers(cx.n_nodes)
    if k == 1:
        n = cx.n_nodes
        nc = int(np.count_nonzero(labeling.labels[:n] == ci))
        return [math.comb(n - nc, 2), nc * (n - nc), math.comb(nc, 2)]
    return _type_counts(potential_simplices(cx, k), labeling, ci, k + 1)


def hetero_simplicial_baseline(cx: SimplicialComplex, labeling: ClassLabeling, c, t: int, k: int) -> Fraction:
    """Type-t affinity of class c over the potential k-simplices."""
    g = k + 1
    _check_t(t, g)
    ci = labeling.class_index(c)
    dist = _slot_distribution(_potential_type_counts(cx, labeling, ci, k), g)
    if dist is None:
        raise UndefinedScoreError(f"class {c!r} appears in no potential {k}-simplex")
    return dist[t - 1]


def hetero_scores(data, labeling: ClassLabeling, c, *, k: int | None = None, g: int | None = None) -> TypeProfile:
    """Full type-t profile for class ``c``.

    For a :class:`SimplicialComplex` pass ``k`` (groups are X^k, g = k+1) and
    both the hypergraph and simplicial variants are returned. For a
    :class:`Hypergraph` or plain group collection pass ``g``.
    """
    is_cx = isinstance(data, SimplicialComplex)
    if is_cx:
        if k is None:
            if g is None:
                raise DomainError("pass k (or g) for a simplicial complex")
            k = g - 1
        g = k + 1
    elif g is None:
        raise DomainError("pass g for a hypergraph")
    ci = labeling.class_index(c)
    counts = _type_counts(_groups_of(data, g), labeling, ci, g)
    dist = _slot_distribution(counts, g)
    undefined: dict[str, list[int]] = {}
    ts = range(1, g + 1)
    aff = list(dist) if dist is not None else [None] * g
    if dist is None:
        undefined["affinity"] = list(ts)

    hb = [_hetero_node_baseline(labeling.n, int(labeling.class_counts[ci]), t, g) for t in ts]
    hs = _per_t_scores(aff, hb, "hypergraph", undefined)
    profile = TypeProfile(c, g, counts[1:], aff, hb, hs, undefined=undefined)
    if is_cx:
        pcounts = _potential_type_counts(data, labeling, ci, k)
        pdist = _slot_distribution(pcounts, g)
        sb = list(pdist) if pdist is not None else [None] * g
        if pdist is None:
            undefined["simplicial_baseline"] = list(ts)
        profile.simplicial_counts = pcounts[1:]
        profile.simplicial_baseline = sb
        profile.simplicial_score = _per_t_scores(aff, sb, "simplicial", undefined)
    return profile


def _per_t_scores(aff, base, name, undefined):
    out = []
    for t, (a, b) in enumerate(zip(aff, base), start=1):
        if a is None or b is None:
            out.append(None)
            undefined.setdefault(f"{name}_score", []).append(t)
            continue
        try:
            s, _ = _divide(a, b, name)
        except UndefinedScoreError:
            s = None
            undefined.setdefault(f"{name}_score", []).append(t)
        out.append(s)
    return out
