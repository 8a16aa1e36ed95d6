"""Node-subsampling error bars and log-log explained-variance regressions."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats as sps

from .complex import ClassLabeling, SimplicialComplex
from .errors import DomainError, SimphomError

__all__ = [
    "BootstrapResult",
    "BootstrapSpec",
    "RegressionResult",
    "bootstrap_scores",
    "explained_variance",
    "induced_subcomplex",
    "ols",
]


@dataclass(frozen=True)
class BootstrapSpec:
    trials: int = 50
    node_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.trials < 2:
            raise DomainError("bootstrap needs at least two trials")
        if not 0.0 < self.node_fraction <= 1.0:
            raise DomainError("node_fraction must lie in (0, 1]")


@dataclass
class BootstrapResult:
    values: dict[str, np.ndarray]  # per quantity, one entry per trial (NaN = missing)
    std: dict[str, float]
    missing: dict[str, int]
    spec: BootstrapSpec


def induced_subcomplex(cx: SimplicialComplex, labeling: ClassLabeling, nodes) -> tuple[SimplicialComplex, ClassLabeling]:
    """Restrict to ``nodes``: keep simplices whose vertices are all kept, renumber densely."""
    nodes = np.sort(np.asarray(nodes, dtype=np.int64))
    return cx.induced(nodes.tolist()), labeling.restrict(nodes)


def bootstrap_scores(
    cx: SimplicialComplex,
    labeling: ClassLabeling,
    spec: BootstrapSpec,
    score_fn: Callable[[SimplicialComplex, ClassLabeling], Mapping[str, float | None]],
) -> BootstrapResult:
    """Standard deviation of scores over random node subsets.

    Each trial samples ``round(node_fraction * n)`` nodes without
    replacement, takes the induced sub-complex and calls ``score_fn``. A
    quantity that is ``None``/NaN, or a trial where ``score_fn`` raises a
    typed error, counts as missing for that trial.
    """
    n = cx.n_nodes
    size = max(1, int(round(spec.node_fraction * n)))
    rng = np.random.default_rng(spec.seed)
    rows: list[Mapping[str, float | None] | None] = []
    for _ in range(spec.trials):
        nodes = rng.choice(n, size=size, replace=False) if size < n else np.arange(n)
        sub, sub_lab = induced_subcomplex(cx, labeling, nodes)
        try:
            rows.append(score_fn(sub, sub_lab))
        except SimphomError:
            rows.append(None)
    keys = sorted({k for r in rows if r for k in r})
    values = {}
    for key in keys:
        col = [r.get(key) if r else None for r in rows]
        values[key] = np.array([math.nan if v is None else float(v) for v in col])
    std, missing = {}, {}
    for key, col in values.items():
        ok = col[~np.isnan(col)]
        missing[key] = int(np.isnan(col).sum())
        std[key] = float(ok.std(ddof=1)) if len(ok) > 1 else math.nan
    return BootstrapResult(values, std, missing, spec)


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    r_squared: float
    p_value: float
    n: int
    slope_se: float
    t_stat: float

    def as_dict(self):
        return asdict(self)


def ols(x, y) -> RegressionResult:
    """Simple linear regression of y on x with intercept.

    The slope p-value is two-sided, from a t distribution with n-2 degrees
    of freedom.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 3 or len(y) != n:
        raise DomainError("need at least three paired observations")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0:
        raise DomainError("predictor is constant")
    sxy = float(np.sum((x - xm) * (y - ym)))
    syy = float(np.sum((y - ym) ** 2))
    slope = sxy / sxx
    intercept = ym - slope * xm
    sse = max(syy - slope * sxy, 0.0)
    r2 = 1.0 - sse / syy if syy > 0 else 1.0
    dof = n - 2
    se = math.sqrt(sse / dof / sxx)
    if se == 0:
        # exact fit
        t = math.copysign(math.inf, slope) if slope else 0.0
        p = 0.0 if slope else 1.0
    else:
        t = slope / se
        p = float(2.0 * sps.t.sf(abs(t), dof))
    return RegressionResult(slope, intercept, min(max(r2, 0.0), 1.0), p, n, se, t)


def explained_variance(pairs: Mapping[str, tuple[float, float]] | Iterable[tuple[str, float, float]]) -> RegressionResult:
    """Regress log(target score) on log(graph score) across datasets.

    ``pairs`` maps dataset name to ``(graph_score, target_score)``, or is an
    iterable of ``(name, graph_score, target_score)``.
    """
    items = [(k, *v) for k, v in pairs.items()] if isinstance(pairs, Mapping) else [tuple(p) for p in pairs]
    for name, g, t in items:
        for which, v in (("graph", g), ("target", t)):
            if v is None or not v > 0 or not math.isfinite(v):
                raise DomainError(f"dataset {name!r}: {which} score {v!r} must be positive and finite")
    if len(items) < 3:
        raise DomainError("explained variance needs at least three datasets")
    x = np.log([g for _, g, _ in items])
    y = np.log([t for _, _, t in items])
    return ols(x, y)
