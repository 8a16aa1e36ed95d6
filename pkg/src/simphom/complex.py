"""Labeled simplicial complexes, hypergraphs and potential-simplex enumeration.

Nodes are dense integers ``0..n-1``. A simplex is a strictly increasing tuple
of node ids; its dimension is ``len(simplex) - 1``.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DomainError, MalformedInputError, MissingLabelError

__all__ = [
    "ClassLabeling",
    "Hypergraph",
    "SimplicialComplex",
    "SkeletonView",
    "Simplex",
    "build_complex",
    "canonical_simplex",
    "complex_from_hypergraph",
    "enumerate_potential_k_simplices",
    "is_homogeneous",
    "k_skeleton",
    "potential_simplices",
    "type_count",
]

Simplex = tuple[int, ...]


def canonical_simplex(vertices: Iterable[int]) -> Simplex:
    """Return the sorted tuple form of ``vertices``.

    Raises MalformedInputError on repeated or negative vertex ids.
    """
    s = tuple(sorted(int(v) for v in vertices))
    for a, b in zip(s, s[1:]):
        if a == b:
            raise MalformedInputError(f"simplex {s} repeats vertex {a}")
    if s and s[0] < 0:
        raise MalformedInputError(f"simplex {s} has a negative vertex id")
    return s


# --------------------------------------------------------------------------
# labels


@dataclass(frozen=True, eq=False)
class ClassLabeling:
    """Total map from node id to class index.

    ``labels[v]`` is an index into ``classes``; ``classes`` is the label
    domain and may contain classes with no members.
    """

    labels: np.ndarray
    classes: tuple

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "classes", tuple(self.classes))
        if len(self.classes) < 2:
            raise DomainError("a labeling needs a domain of at least two classes")
        if len(set(self.classes)) != len(self.classes):
            raise DomainError("duplicate class names in labeling domain")
        if labels.ndim != 1:
            raise DomainError("labels must be one-dimensional")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.classes)):
            raise DomainError("label index outside the class domain")

    @classmethod
    def from_sequence(cls, values: Sequence[Hashable], classes: Sequence[Hashable] | None = None):
        """Build from one class value per node (node ``i`` gets ``values[i]``)."""
        if classes is None:
            classes = _sorted_domain(set(values))
        index = {c: i for i, c in enumerate(classes)}
        try:
            idx = [index[v] for v in values]
        except KeyError as exc:
            raise DomainError(f"label {exc.args[0]!r} is not in the class domain") from None
        return cls(np.array(idx, dtype=np.int64), tuple(classes))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, Hashable], n: int, classes=None):
        missing = [v for v in range(n) if v not in mapping]
        if missing:
            raise MissingLabelError(missing)
        return cls.from_sequence([mapping[v] for v in range(n)], classes)

    @property
    def n(self) -> int:
        return int(self.labels.size)

    @property
    def m(self) -> int:
        return len(self.classes)

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.m)

    def class_index(self, c) -> int:
        try:
            return self.classes.index(c)
        except ValueError:
            raise DomainError(f"class {c!r} is not in the labeling domain {self.classes}") from None

    def label_of(self, node: int):
        return self.classes[self.index_of(node)]

    def index_of(self, node: int) -> int:
        if not 0 <= node < self.n:
            raise MissingLabelError([node])
        return int(self.labels[node])

    def check_covers(self, n_nodes: int) -> None:
        if n_nodes > self.n:
            raise MissingLabelError(range(self.n, n_nodes))

    def restrict(self, nodes: Sequence[int]) -> ClassLabeling:
        """Labeling of the sub-population ``nodes`` (renumbered ``0..len-1``), same domain."""
        return ClassLabeling(self.labels[np.asarray(nodes, dtype=np.int64)], self.classes)

    def __eq__(self, other):
        if not isinstance(other, ClassLabeling):
            return NotImplemented
        return self.classes == other.classes and np.array_equal(self.labels, other.labels)

    __hash__ = None


def _sorted_domain(values):
    try:
        return tuple(sorted(values))
    except TypeError:
        return tuple(sorted(values, key=str))


def is_homogeneous(s: Sequence[int], labeling: ClassLabeling) -> bool:
    """True iff every vertex of ``s`` carries the same label."""
    idx = {labeling.index_of(v) for v in s}
    return len(idx) <= 1


def type_count(s: Sequence[int], c, labeling: ClassLabeling) -> int:
    """Number of vertices of ``s`` whose class is ``c``."""
    ci = labeling.class_index(c)
    return sum(1 for v in s if labeling.index_of(v) == ci)


# --------------------------------------------------------------------------
# hypergraphs


@dataclass(frozen=True)
class Hypergraph:
    """Deduplicated hyperedges grouped by size, with per-edge multiplicities."""

    edges_by_size: Mapping[int, frozenset]
    multiplicities: Counter = field(default_factory=Counter)
    n_nodes: int = 0

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[int]], n_nodes: int | None = None) -> Hypergraph:
        mult: Counter = Counter()
        for g in groups:
            mult[canonical_simplex(g)] += 1
        by_size: dict[int, set] = {}
        for e in mult:
            by_size.setdefault(len(e), set()).add(e)
        top = max((e[-1] for e in mult if e), default=-1) + 1
        n = top if n_nodes is None else n_nodes
        if n < top:
            raise DomainError(f"n_nodes={n_nodes} but a hyperedge uses node {top - 1}")
        return cls({g: frozenset(s) for g, s in by_size.items()}, mult, n)

    def edges_of_size(self, g: int) -> frozenset:
        return self.edges_by_size.get(g, frozenset())

    def __iter__(self) -> Iterator[Simplex]:
        for g in sorted(self.edges_by_size):
            yield from sorted(self.edges_by_size[g])

    def __len__(self) -> int:
        return sum(len(s) for s in self.edges_by_size.values())


# --------------------------------------------------------------------------
# simplicial complexes


class SimplicialComplex:
    """Immutable downward-closed simplex store.

    Every node ``0..n_nodes-1`` is a 0-simplex. Higher simplices are kept per
    dimension in hashed sets; the 1-skeleton is also kept as sorted neighbor
    tuples. Build instances with :func:`build_complex`.
    """

    __slots__ = ("_by_dim", "_n", "_adj", "_adj_sets", "truncated_at")

    def __init__(self, by_dim: Mapping[int, frozenset], n_nodes: int, truncated_at: int | None = None):
        self._by_dim = {d: s for d, s in by_dim.items() if s and d >= 1}
        self._n = int(n_nodes)
        self.truncated_at = truncated_at
        nbrs: list[list[int]] = [[] for _ in range(self._n)]
        for u, v in self._by_dim.get(1, ()):
            nbrs[u].append(v)
            nbrs[v].append(u)
        self._adj = tuple(tuple(sorted(x)) for x in nbrs)
        self._adj_sets = None

    @classmethod
    def from_closed_arrays(cls, n_nodes: int, arrays: Mapping[int, np.ndarray]) -> SimplicialComplex:
        """Trusted constructor: ``arrays[d]`` holds sorted-row d-simplices and the
        union is already downward closed. No validation is done."""
        by_dim = {d: frozenset(map(tuple, np.asarray(a).tolist())) for d, a in arrays.items()}
        return cls(by_dim, n_nodes)

    @property
    def n_nodes(self) -> int:
        return self._n

    @property
    def max_dimension(self) -> int:
        if self._n == 0:
            return -1
        return max(self._by_dim, default=0)

    def simplices(self, dim: int) -> frozenset:
        """The set X^dim of ``dim``-simplices."""
        if dim == 0:
            return frozenset((v,) for v in range(self._n))
        return self._by_dim.get(dim, frozenset())

    def count(self, dim: int) -> int:
        return self._n if dim == 0 else len(self._by_dim.get(dim, ()))

    def simplex_array(self, dim: int) -> np.ndarray:
        """X^dim as a lexicographically sorted ``(count, dim+1)`` int array."""
        if dim == 0:
            return np.arange(self._n, dtype=np.int64).reshape(-1, 1)
        s = self._by_dim.get(dim)
        if not s:
            return np.empty((0, dim + 1), dtype=np.int64)
        return _lexsorted(np.array(list(s), dtype=np.int64))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbor_sets(self) -> list[frozenset]:
        if self._adj_sets is None:
            self._adj_sets = [frozenset(a) for a in self._adj]
        return self._adj_sets

    def __contains__(self, s) -> bool:
        s = tuple(s)
        if len(s) == 1:
            return 0 <= s[0] < self._n
        return s in self._by_dim.get(len(s) - 1, ())

    def all_simplices(self) -> Iterator[Simplex]:
        for d in range(self.max_dimension + 1):
            yield from sorted(self.simplices(d))

    def __len__(self) -> int:
        return self._n + sum(len(s) for s in self._by_dim.values())

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self._n == other._n and self._by_dim == other._by_dim

    __hash__ = None

    def __repr__(self):
        counts = ", ".join(f"X^{d}={self.count(d)}" for d in range(self.max_dimension + 1))
        return f"SimplicialComplex(n={self._n}, {counts})"

    def is_closed(self) -> bool:
        """Exhaustively verify downward closure."""
        for d, simplices in self._by_dim.items():
            for s in simplices:
                for j in range(1, d + 1):
                    for face in combinations(s, j):
                        if face not in self:
                            return False
                if s[-1] >= self._n:
                    return False
        return True

    def induced(self, nodes: Sequence[int]) -> SimplicialComplex:
        """Sub-complex on ``nodes`` (renumbered in the given order).

        A simplex survives iff all of its vertices are kept.
        """
        remap = {int(v): i for i, v in enumerate(nodes)}
        by_dim = {}
        for d, simplices in self._by_dim.items():
            kept = set()
            for s in simplices:
                try:
                    kept.add(tuple(sorted(remap[v] for v in s)))
                except KeyError:
                    continue
            by_dim[d] = frozenset(kept)
        return SimplicialComplex(by_dim, len(remap), self.truncated_at)


def build_complex(
    simplices: Iterable[Iterable[int]],
    n_nodes: int | None = None,
    max_dim: int | None = None,
) -> SimplicialComplex:
    """Downward closure of ``simplices``.

    Parameters
    ----------
    simplices
        Vertex collections; order inside each is irrelevant, duplicates collapse.
    n_nodes
        Size of the node set. Defaults to one past the largest vertex id.
    max_dim
        If given, faces above this dimension are not stored; the result is
        then the ``max_dim``-skeleton of the full closure. Useful for data
        with very large groups.
    """
    unique = {canonical_simplex(s) for s in simplices}
    unique.discard(())
    top = max((s[-1] for s in unique), default=-1) + 1
    n = top if n_nodes is None else int(n_nodes)
    if n < top:
        raise MalformedInputError(f"n_nodes={n} but a simplex uses node {top - 1}")
    cap = None if max_dim is None else int(max_dim)
    by_dim: dict[int, set] = {}
    for s in unique:
        size = len(s) if cap is None else min(len(s), cap + 1)
        for j in range(2, size + 1):
            bucket = by_dim.setdefault(j - 1, set())
            if j == len(s):
                bucket.add(s)
            else:
                bucket.update(combinations(s, j))
    return SimplicialComplex({d: frozenset(v) for d, v in by_dim.items()}, n, cap)


def complex_from_hypergraph(h: Hypergraph, max_dim: int | None = None) -> SimplicialComplex:
    """Every hyperedge becomes a simplex; all faces are added."""
    return build_complex(h.multiplicities.keys(), n_nodes=h.n_nodes, max_dim=max_dim)


class SkeletonView:
    """Read-only view of the simplices of dimension at most ``k``."""

    def __init__(self, complex_: SimplicialComplex, k: int):
        if k < 0:
            raise DomainError("skeleton dimension must be >= 0")
        self.complex = complex_
        self.k = k

    def simplices(self, dim: int) -> frozenset:
        return self.complex.simplices(dim) if dim <= self.k else frozenset()

    def __contains__(self, s) -> bool:
        return len(tuple(s)) - 1 <= self.k and s in self.complex

    def __iter__(self) -> Iterator[Simplex]:
        for d in range(min(self.k, self.complex.max_dimension) + 1):
            yield from sorted(self.complex.simplices(d))

    def __len__(self) -> int:
        return sum(self.complex.count(d) for d in range(min(self.k, self.complex.max_dimension) + 1))

    def to_complex(self) -> SimplicialComplex:
        by_dim = {d: self.complex.simplices(d) for d in range(1, self.k + 1)}
        return SimplicialComplex(by_dim, self.complex.n_nodes)


def k_skeleton(complex_: SimplicialComplex, k: int) -> SkeletonView:
    return SkeletonView(complex_, k)


# --------------------------------------------------------------------------
# potential simplices


def _lexsorted(arr: np.ndarray) -> np.ndarray:
    if len(arr) == 0:
        return arr
    order = np.lexsort(arr.T[::-1])
    return arr[order]


def _closed_triangles(cx: SimplicialComplex) -> np.ndarray:
    # Orient each edge from lower to higher (degree, id) rank; each triangle is
    # then found exactly once, at its lowest-ranked vertex.
    n = cx.n_nodes
    adj = cx._adj
    rank = np.empty(n, dtype=np.int64)
    order = sorted(range(n), key=lambda v: (len(adj[v]), v))
    rank[order] = np.arange(n)
    rank_l = rank.tolist()
    out = [set() for _ in range(n)]
    for u in range(n):
        ru = rank_l[u]
        out[u] = {v for v in adj[u] if rank_l[v] > ru}
    a, b, c = [], [], []
    for u in order:
        ou = out[u]
        if len(ou) < 2:
            continue
        for v in ou:
            common = ou & out[v]
            if common:
                for w in common:
                    a.append(u)
                    b.append(v)
                    c.append(w)
    if not a:
        return np.empty((0, 3), dtype=np.int64)
    tris = np.sort(np.column_stack([a, b, c]).astype(np.int64), axis=1)
    return _lexsorted(tris)


def _extend_simplices(cx: SimplicialComplex, k: int) -> np.ndarray:
    # Each candidate S is generated once, from the face S minus its largest vertex.
    faces = cx.simplices(k - 1)
    nbr = cx.neighbor_sets()
    found = []
    for s in faces:
        common = set(nbr[s[0]])
        for v in s[1:]:
            common &= nbr[v]
            if not common:
                break
        top = s[-1]
        for w in common:
            if w <= top:
                continue
            if all(s[:i] + s[i + 1:] + (w,) in faces for i in range(k)):
                found.append(s + (w,))
    if not found:
        return np.empty((0, k + 1), dtype=np.int64)
    return _lexsorted(np.array(found, dtype=np.int64))


def potential_simplices(cx: SimplicialComplex, k: int) -> np.ndarray:
    """Every (k+1)-node set whose k-subsets all lie in X^(k-1).

    Returned as a lexicographically sorted ``(count, k+1)`` int array. Sets
    already present in X^k are included.
    """
    if k < 1:
        raise DomainError("potential simplices are defined for k >= 1")
    if cx.truncated_at is not None and cx.truncated_at < k - 1:
        raise DomainError(f"complex was truncated at dimension {cx.truncated_at}; need {k - 1}")
    if k == 1:
        i, j = np.triu_indices(cx.n_nodes, 1)
        return np.column_stack([i, j]).astype(np.int64)
    if k == 2:
        return _closed_triangles(cx)
    return _extend_simplices(cx, k)


def enumerate_potential_k_simplices(cx: SimplicialComplex, k: int) -> Iterator[Simplex]:
    """Stream of potential k-simplices in canonical (lexicographic) order."""
    for row in potential_simplices(cx, k).tolist():
        yield tuple(row)
