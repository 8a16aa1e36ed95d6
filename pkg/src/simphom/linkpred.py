"""Higher-order link prediction: will a closed, unfilled triangle become filled?

Protocol
--------
The time-ordered record stream is cut at 50% of records. Everything used to
fit a model comes from the first half: that half is cut again, features are
computed on its first part and labels read from its second part. The fitted
model then scores candidates built from the whole first half, labeled by the
second half of the stream.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .complex import ClassLabeling, SimplicialComplex, build_complex, canonical_simplex, potential_simplices
from .errors import DomainError, InputError, SimphomError, UndefinedScoreError
from .homophily import hypergraph_score, simplicial_score

__all__ = [
    "BenchmarkConfig",
    "BenchmarkRow",
    "CandidateTriangle",
    "EvalResult",
    "FEATURE_NAMES",
    "LogisticModel",
    "TemporalDataset",
    "TimestampedSimplex",
    "TrainConfig",
    "TrainingWindow",
    "auc_pr",
    "bootstrap_ci",
    "evaluate",
    "extract_features",
    "feature_matrix",
    "generate_candidates",
    "run_benchmark",
    "temporal_split",
    "train",
]


@dataclass(frozen=True)
class TimestampedSimplex:
    simplex: tuple[int, ...]
    time: float | int | None

    def __post_init__(self):
        object.__setattr__(self, "simplex", canonical_simplex(self.simplex))


@dataclass
class TemporalDataset:
    stream: list[TimestampedSimplex]
    labeling: ClassLabeling
    name: str = "dataset"

    def __post_init__(self):
        top = max((r.simplex[-1] for r in self.stream if r.simplex), default=-1)
        self.labeling.check_covers(top + 1)

    @property
    def n_nodes(self) -> int:
        return self.labeling.n


def _check_sorted(stream: Sequence[TimestampedSimplex]) -> None:
    times = [r.time for r in stream]
    if any(t is None for t in times):
        raise InputError("stream has records without timestamps")
    for i in range(1, len(times)):
        if times[i] < times[i - 1]:
            raise InputError(f"stream is not sorted by time (record {i})")


def temporal_split(stream, fraction: float = 0.5):
    """Split a time-ordered stream by record count.

    Accepts a :class:`TemporalDataset` or a plain record list. The first
    ``floor(len * fraction)`` records form the training window; records
    sharing a timestamp keep their input order.
    """
    records = stream.stream if isinstance(stream, TemporalDataset) else list(stream)
    if not records:
        raise InputError("cannot split an empty stream")
    if not 0.0 < fraction < 1.0:
        raise DomainError("split fraction must lie in (0, 1)")
    _check_sorted(records)
    cut = int(math.floor(len(records) * fraction))
    return records[:cut], records[cut:]


# --------------------------------------------------------------------------
# candidates and features


class TrainingWindow:
    """Structural statistics of a record window, used for candidates and features."""

    def __init__(self, records: Iterable[TimestampedSimplex], n_nodes: int):
        records = list(records)
        self.n_nodes = n_nodes
        self.tie_counts: Counter = Counter()
        self.node_simplex_counts = np.zeros(n_nodes, dtype=np.int64)
        for r in records:
            s = r.simplex
            self.node_simplex_counts[list(s)] += 1
            if len(s) >= 2:
                self.tie_counts.update(combinations(s, 2))
        self.complex: SimplicialComplex = build_complex((r.simplex for r in records), n_nodes=n_nodes, max_dim=2)
        self.filled = self.complex.simplices(2)
        self.neighbors = self.complex.neighbor_sets()

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def common_neighbors(self, u: int, v: int) -> int:
        return len(self.neighbors[u] & self.neighbors[v])


@dataclass(frozen=True)
class CandidateTriangle:
    nodes: tuple[int, int, int]
    label: bool = False

    def __post_init__(self):
        nodes = canonical_simplex(self.nodes)
        if len(nodes) != 3:
            raise DomainError(f"candidate {self.nodes} is not a triangle")
        object.__setattr__(self, "nodes", nodes)


def _filled_triples(records: Iterable[TimestampedSimplex]) -> set:
    out = set()
    for r in records:
        if len(r.simplex) >= 3:
            out.update(combinations(r.simplex, 3))
    return out


def generate_candidates(
    train: Iterable[TimestampedSimplex] | TrainingWindow,
    test: Iterable[TimestampedSimplex] = (),
    n_nodes: int | None = None,
) -> list[CandidateTriangle]:
    """Closed but unfilled triangles of the training window.

    A candidate is positive iff some test record with at least three nodes
    contains all three of its nodes.
    """
    if not isinstance(train, TrainingWindow):
        train = list(train)
        if n_nodes is None:
            n_nodes = max((r.simplex[-1] for r in train if r.simplex), default=-1) + 1
        train = TrainingWindow(train, n_nodes)
    positives = _filled_triples(test)
    filled = train.filled
    out = []
    for tri in potential_simplices(train.complex, 2).tolist():
        t = tuple(tri)
        if t in filled:
            continue
        out.append(CandidateTriangle(t, t in positives))
    return out


_RAW_GROUPS = ("tie", "degree", "simplex_degree", "common_neighbors")
FEATURE_NAMES = tuple(
    [f"{g}_{i}" for g in _RAW_GROUPS for i in range(3)]
    + [f"log_{g}_{i}" for g in _RAW_GROUPS for i in range(3)]
)
HOMOGENEITY_FEATURE = "homogeneous"


def feature_matrix(
    candidates: Sequence[CandidateTriangle],
    window: TrainingWindow,
    with_labels: bool = False,
    labeling: ClassLabeling | None = None,
) -> np.ndarray:
    """Feature rows for ``candidates``.

    Columns follow :data:`FEATURE_NAMES`, plus a trailing homogeneity bit
    when ``with_labels``. Within each group of three values (one per pair or
    per node) entries are sorted in descending order, so the row does not
    depend on the order of the candidate's nodes.
    """
    if with_labels and labeling is None:
        raise DomainError("with_labels requires a labeling")
    raw = np.zeros((len(candidates), 12), dtype=np.float64)
    ties = window.tie_counts
    simplex_deg = window.node_simplex_counts
    for row, cand in enumerate(candidates):
        a, b, c = cand.nodes
        pairs = ((a, b), (a, c), (b, c))
        raw[row, 0:3] = sorted((ties.get(p, 0) for p in pairs), reverse=True)
        raw[row, 3:6] = sorted((window.degree(v) for v in cand.nodes), reverse=True)
        raw[row, 6:9] = sorted((simplex_deg[v] for v in cand.nodes), reverse=True)
        raw[row, 9:12] = sorted((window.common_neighbors(u, v) for u, v in pairs), reverse=True)
    feats = np.hstack([raw, np.log1p(raw)])
    if with_labels:
        lab = labeling.labels[np.array([c.nodes for c in candidates], dtype=np.int64).reshape(-1, 3)]
        hom = (lab[:, 0] == lab[:, 1]) & (lab[:, 1] == lab[:, 2])
        feats = np.hstack([feats, hom.astype(np.float64)[:, None]])
    return feats


def extract_features(
    candidate: CandidateTriangle,
    window: TrainingWindow,
    with_labels: bool = False,
    labeling: ClassLabeling | None = None,
) -> np.ndarray:
    return feature_matrix([candidate], window, with_labels, labeling)[0]


# --------------------------------------------------------------------------
# logistic regression


@dataclass(frozen=True)
class TrainConfig:
    """L2-regularized logistic regression settings.

    ``l2`` multiplies ``0.5 * ||w||^2`` added to the mean log-loss; the
    intercept is not penalized. ``solver`` is ``"newton"`` (IRLS) or
    ``"gd"`` (batch gradient descent with a 1/L step).
    """

    l2: float = 1e-3
    solver: str = "newton"
    max_iter: int = 100
    tol: float = 1e-10
    gd_max_iter: int = 20000


@dataclass
class LogisticModel:
    weights: np.ndarray
    intercept: float
    mean: np.ndarray
    scale: np.ndarray
    config: TrainConfig = field(default_factory=TrainConfig)
    n_iter: int = 0
    converged: bool = False

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        z = (np.asarray(features, dtype=float) - self.mean) / self.scale
        return z @ self.weights + self.intercept

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision_function(features))

    def objective(self, features: np.ndarray, labels: np.ndarray) -> float:
        """Regularized mean log-loss (what training minimizes)."""
        y = np.asarray(labels, dtype=float)
        z = self.decision_function(features)
        loss = np.mean(np.logaddexp(0.0, z) - y * z)
        return float(loss + 0.5 * self.config.l2 * self.weights @ self.weights)


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def train(features, labels, config: TrainConfig | None = None, seed: int = 0) -> LogisticModel:
    """Fit an L2-regularized logistic regression on standardized features.

    Standardization statistics come from ``features`` only. Both solvers
    start from zero weights, so the fit is deterministic; ``seed`` is
    accepted for interface symmetry and recorded nowhere else.
    """
    config = config or TrainConfig()
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if x.ndim != 2 or len(x) != len(y):
        raise DomainError("features must be 2-D with one row per label")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == len(y):
        raise InputError("training labels contain a single class")
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale == 0] = 1.0
    z = np.hstack([np.ones((len(x), 1)), (x - mean) / scale])
    penalty = np.full(z.shape[1], config.l2)
    penalty[0] = 0.0
    if config.solver == "newton":
        beta, it, ok = _fit_newton(z, y, penalty, config)
    elif config.solver == "gd":
        beta, it, ok = _fit_gd(z, y, penalty, config)
    else:
        raise DomainError(f"unknown solver {config.solver!r}")
    return LogisticModel(beta[1:].copy(), float(beta[0]), mean, scale, config, it, ok)


def _gradient(z, y, beta, penalty):
    p = _sigmoid(z @ beta)
    return z.T @ (p - y) / len(y) + penalty * beta, p


def _fit_newton(z, y, penalty, config):
    beta = np.zeros(z.shape[1])
    n = len(y)
    for it in range(1, config.max_iter + 1):
        grad, p = _gradient(z, y, beta, penalty)
        w = p * (1 - p)
        hess = (z.T * w) @ z / n + np.diag(penalty)
        # tiny ridge keeps the unpenalized / duplicated-column case solvable
        hess[np.diag_indices_from(hess)] += 1e-12
        step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        beta = beta - step
        if np.max(np.abs(grad)) < config.tol:
            return beta, it, True
    return beta, config.max_iter, False


def _fit_gd(z, y, penalty, config):
    beta = np.zeros(z.shape[1])
    lip = 0.25 * np.linalg.eigvalsh(z.T @ z / len(y))[-1] + penalty.max()
    lr = 1.0 / lip
    for it in range(1, config.gd_max_iter + 1):
        grad, _ = _gradient(z, y, beta, penalty)
        if np.max(np.abs(grad)) < max(config.tol, 1e-8):
            return beta, it, True
        beta = beta - lr * grad
    return beta, config.gd_max_iter, False


# --------------------------------------------------------------------------
# evaluation


def auc_pr(scores, labels) -> float:
    """Area under the precision-recall curve, average-precision convention.

    Candidates are ranked by descending score; tied scores form one
    threshold. The area is the sum over thresholds of (recall increase) x
    (precision at that threshold).
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise UndefinedScoreError("AUC-PR needs at least one positive example")
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    tp = np.cumsum(y)
    last = np.r_[np.flatnonzero(np.diff(s)), len(s) - 1]
    tp = tp[last]
    precision = tp / (last + 1)
    recall_gain = np.diff(np.r_[0, tp]) / n_pos
    return float(np.sum(recall_gain * precision))


@dataclass(frozen=True)
class EvalResult:
    auc_pr: float
    random_baseline: float
    relative_score: float
    ci: tuple[float, float]

    def as_dict(self):
        return asdict(self)


def _relative(scores, labels) -> float:
    y = np.asarray(labels, dtype=bool)
    return auc_pr(scores, y) / (y.sum() / len(y))


def bootstrap_ci(
    scores,
    labels,
    trials: int = 1000,
    seed: int = 0,
    level: float = 0.95,
    max_retries: int = 100,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the relative AUC-PR.

    Test examples are resampled with replacement; a resample without any
    positive is redrawn, at most ``max_retries`` times per trial.
    """
    if trials < 2:
        raise DomainError("bootstrap needs at least two trials")
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    if not y.any():
        raise UndefinedScoreError("no positive examples to bootstrap")
    rng = np.random.default_rng(seed)
    n = len(s)
    values = np.empty(trials)
    for i in range(trials):
        for _ in range(max_retries + 1):
            idx = rng.integers(0, n, n)
            if y[idx].any():
                break
        else:
            raise UndefinedScoreError("could not draw a resample with a positive example")
        values[i] = _relative(s[idx], y[idx])
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(values, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def evaluate(scores, labels, trials: int = 1000, seed: int = 0) -> EvalResult:
    y = np.asarray(labels, dtype=bool)
    ap = auc_pr(scores, y)
    prevalence = float(y.sum() / len(y))
    return EvalResult(ap, prevalence, ap / prevalence, bootstrap_ci(scores, y, trials, seed))


# --------------------------------------------------------------------------
# benchmark


@dataclass(frozen=True)
class BenchmarkConfig:
    train_fraction: float = 0.5
    inner_fraction: float = 0.5
    l2: float = 1e-3
    solver: str = "newton"
    max_iter: int = 100
    bootstrap_trials: int = 1000
    seed: int = 0

    def train_config(self) -> TrainConfig:
        return TrainConfig(l2=self.l2, solver=self.solver, max_iter=self.max_iter)


@dataclass
class BenchmarkRow:
    dataset: str
    without_labels: EvalResult
    with_labels: EvalResult
    simplicial_score: float | None
    hypergraph_score: float | None
    n_fit_candidates: int
    n_test_candidates: int
    n_test_positives: int

    def as_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "without_labels": self.without_labels.relative_score,
            "without_labels_ci_lo": self.without_labels.ci[0],
            "without_labels_ci_hi": self.without_labels.ci[1],
            "with_labels": self.with_labels.relative_score,
            "with_labels_ci_lo": self.with_labels.ci[0],
            "with_labels_ci_hi": self.with_labels.ci[1],
            "auc_pr_without": self.without_labels.auc_pr,
            "auc_pr_with": self.with_labels.auc_pr,
            "random_baseline": self.with_labels.random_baseline,
            "simplicial_score": self.simplicial_score,
            "hypergraph_score": self.hypergraph_score,
            "n_fit_candidates": self.n_fit_candidates,
            "n_test_candidates": self.n_test_candidates,
            "n_test_positives": self.n_test_positives,
        }


def _score_or_none(fn, *args):
    try:
        return float(fn(*args).score)
    except SimphomError:
        return None


def run_benchmark(ds: TemporalDataset, config: BenchmarkConfig | None = None) -> BenchmarkRow:
    """One results row: relative AUC-PR without/with the homogeneity feature,
    plus triangle homophily scores of the training window."""
    config = config or BenchmarkConfig()
    n = ds.n_nodes
    train_records, test_records = temporal_split(ds, config.train_fraction)
    fit_records, fit_label_records = temporal_split(train_records, config.inner_fraction)

    fit_window = TrainingWindow(fit_records, n)
    fit_cands = generate_candidates(fit_window, fit_label_records)
    window = TrainingWindow(train_records, n)
    test_cands = generate_candidates(window, test_records)
    if not fit_cands or not test_cands:
        raise UndefinedScoreError("no closed, unfilled triangles to predict")
    y_fit = np.array([c.label for c in fit_cands])
    y_test = np.array([c.label for c in test_cands])
    if not y_test.any():
        raise UndefinedScoreError("no test candidate becomes filled")

    results = []
    for with_labels in (False, True):
        model = train(feature_matrix(fit_cands, fit_window, with_labels, ds.labeling), y_fit, config.train_config(), config.seed)
        pred = model.predict_proba(feature_matrix(test_cands, window, with_labels, ds.labeling))
        results.append(evaluate(pred, y_test, config.bootstrap_trials, config.seed))

    return BenchmarkRow(
        dataset=ds.name,
        without_labels=results[0],
        with_labels=results[1],
        simplicial_score=_score_or_none(simplicial_score, window.complex, ds.labeling, 2),
        hypergraph_score=_score_or_none(hypergraph_score, window.complex, ds.labeling, 3),
        n_fit_candidates=len(fit_cands),
        n_test_candidates=len(test_cands),
        n_test_positives=int(y_test.sum()),
    )
