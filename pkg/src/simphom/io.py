"""Dataset files.

Simplex layout (one value per line, whitespace ignored, ``#`` comments)::

    <prefix>-nverts.txt       number of vertices of each record
    <prefix>-simplices.txt    the vertex ids of all records, concatenated
    <prefix>-times.txt        optional, one timestamp per record
    <prefix>-node-labels.txt  node labels (see below)

Edge lists hold one ``u v`` pair per line; extra columns are ignored.

Label files come in two shapes. If every line has two or more tokens, the
first is a node id and the second its label. If every line has one token,
line ``i`` (1-based) holds the label of node ``i``.

External node ids are remapped to ``0..n-1`` in sorted order; the mapping is
kept on the bundle. Every labeled node is part of the node set, so isolated
labeled nodes count towards class sizes.
"""

from __future__ import annotations

import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .complex import ClassLabeling, Hypergraph, SimplicialComplex, _sorted_domain, build_complex
from .errors import MissingLabelError, ParseError
from .linkpred import TemporalDataset, TimestampedSimplex

__all__ = [
    "DatasetBundle",
    "example_dataset",
    "load_dataset",
    "load_edge_list_with_labels",
    "load_simplex_dataset",
    "read_labels",
    "write_simplex_dataset",
]

log = logging.getLogger(__name__)

SUMMARY_FIELDS = ("nodes", "classes", "edges", "triangles", "time_steps")


@dataclass
class DatasetBundle:
    name: str
    stream: list[TimestampedSimplex]
    labeling: ClassLabeling
    node_ids: list  # external id of each dense node
    source: dict = field(default_factory=dict)
    declared: dict | None = None
    mismatches: dict = field(default_factory=dict)
    _complex: SimplicialComplex | None = field(default=None, repr=False)

    @property
    def has_times(self) -> bool:
        return bool(self.stream) and all(r.time is not None for r in self.stream)

    def complex(self) -> SimplicialComplex:
        """Closure of all records, stored up to triangles (all homophily uses at most X^2)."""
        if self._complex is None:
            self._complex = build_complex((r.simplex for r in self.stream), n_nodes=self.labeling.n, max_dim=2)
        return self._complex

    def full_complex(self, max_dim: int | None = None) -> SimplicialComplex:
        return build_complex((r.simplex for r in self.stream), n_nodes=self.labeling.n, max_dim=max_dim)

    def hypergraph(self) -> Hypergraph:
        return Hypergraph.from_groups((r.simplex for r in self.stream), n_nodes=self.labeling.n)

    def temporal(self) -> TemporalDataset:
        return TemporalDataset(self.stream, self.labeling, self.name)

    def summary(self) -> dict:
        cx = self.complex()
        present = set(self.labeling.labels.tolist())
        return {
            "nodes": self.labeling.n,
            "classes": len(present),
            "edges": cx.count(1),
            "triangles": cx.count(2),
            "time_steps": len({r.time for r in self.stream}) if self.has_times else None,
        }

    def check_declared(self) -> dict:
        if not self.declared:
            return {}
        actual = self.summary()
        self.mismatches = {
            k: (v, actual.get(k)) for k, v in self.declared.items() if k in actual and actual[k] != v
        }
        for k, (want, got) in self.mismatches.items():
            log.warning("%s: declared %s=%s but found %s", self.name, k, want, got)
        return self.mismatches


def _lines(path):
    """(line number, stripped content) for non-blank, non-comment lines."""
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield no, line


def _parse_id(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def _parse_time(tok: str, path, no):
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            raise ParseError(f"{path}:{no}: bad timestamp {tok!r}") from None


def read_labels(path) -> dict:
    """External node id -> label value."""
    rows = list(_lines(path))
    if not rows:
        raise ParseError(f"{path}: empty label file")
    widths = {len(line.split()) for _, line in rows}
    out = {}
    if widths == {1}:
        for i, (_, line) in enumerate(rows, start=1):
            out[i] = _parse_id(line)
        return out
    if 1 in widths:
        bad = next(no for no, line in rows if len(line.split()) == 1)
        raise ParseError(f"{path}:{bad}: mixed one- and two-column label lines")
    for no, line in rows:
        node, label = line.split()[:2]
        node = _parse_id(node)
        if node in out and out[node] != _parse_id(label):
            raise ParseError(f"{path}:{no}: node {node!r} labeled twice")
        out[node] = _parse_id(label)
    return out


def _assemble(name, records, times, labels: dict, source, declared=None) -> DatasetBundle:
    used = {v for r in records for v in r}
    unlabeled = used - labels.keys()
    if unlabeled:
        raise MissingLabelError(unlabeled)
    ids = list(_sorted_domain(labels.keys()))
    dense = {ext: i for i, ext in enumerate(ids)}
    labeling = ClassLabeling.from_sequence([labels[e] for e in ids])
    stream = []
    dup_records = 0
    for r, t in zip(records, times):
        mapped = {dense[v] for v in r}
        if len(mapped) != len(r):
            dup_records += 1
        stream.append(TimestampedSimplex(tuple(mapped), t))
    if dup_records:
        log.warning("%s: %d record(s) repeated a vertex; duplicates dropped", name, dup_records)
    if all(t is not None for t in times):
        order = sorted(range(len(stream)), key=lambda i: stream[i].time)
        stream = [stream[i] for i in order]
    bundle = DatasetBundle(name, stream, labeling, ids, source, declared)
    bundle.check_declared()
    return bundle


def load_simplex_dataset(
    nverts_path,
    simplices_path,
    labels_path,
    times_path=None,
    name: str | None = None,
    declared: dict | None = None,
) -> DatasetBundle:
    """Parse the three-file simplex layout plus a label file.

    Records are stably sorted by timestamp when times are given.
    """
    sizes = []
    for no, line in _lines(nverts_path):
        try:
            k = int(line)
        except ValueError:
            raise ParseError(f"{nverts_path}:{no}: bad vertex count {line!r}") from None
        if k < 1:
            raise ParseError(f"{nverts_path}:{no}: vertex count must be positive")
        sizes.append(k)
    flat = [(no, _parse_id(line)) for no, line in _lines(simplices_path)]
    if sum(sizes) != len(flat):
        raise ParseError(
            f"{nverts_path} declares {sum(sizes)} vertices over {len(sizes)} records "
            f"but {simplices_path} has {len(flat)} vertex lines"
        )
    records, pos = [], 0
    for k in sizes:
        records.append(tuple(v for _, v in flat[pos:pos + k]))
        pos += k
    if times_path is not None:
        times = [_parse_time(line, times_path, no) for no, line in _lines(times_path)]
        if len(times) != len(records):
            raise ParseError(
                f"{times_path} has {len(times)} timestamps but {nverts_path} has {len(records)} records"
            )
    else:
        times = [None] * len(records)
    labels = read_labels(labels_path)
    source = {"nverts": str(nverts_path), "simplices": str(simplices_path), "times": str(times_path) if times_path else None, "labels": str(labels_path)}
    return _assemble(name or Path(nverts_path).name.rsplit("-nverts", 1)[0], records, times, labels, source, declared)


def load_edge_list_with_labels(path, label_path, name: str | None = None, declared: dict | None = None) -> DatasetBundle:
    """Graph-only corpus: ``u v`` lines. Repeated edges stay in the stream (multiplicity)."""
    records = []
    for no, line in _lines(path):
        toks = line.split()
        if len(toks) < 2:
            raise ParseError(f"{path}:{no}: expected 'u v'")
        u, v = _parse_id(toks[0]), _parse_id(toks[1])
        if u == v:
            raise ParseError(f"{path}:{no}: self-loop on {u!r}")
        records.append((u, v))
    labels = read_labels(label_path)
    source = {"edges": str(path), "labels": str(label_path)}
    return _assemble(name or Path(path).stem, records, [None] * len(records), labels, source, declared)


def _find_labels(prefix: Path):
    for cand in (
        prefix.parent / f"{prefix.name}-node-labels.txt",
        prefix.parent / f"node-labels-{prefix.name}.txt",
    ):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no label file found for {prefix} (tried {prefix.name}-node-labels.txt, node-labels-{prefix.name}.txt)")


def load_dataset(path, labels=None, name: str | None = None) -> DatasetBundle:
    """Load by prefix (simplex layout) or by edge-list file path."""
    p = Path(path)
    if p.is_dir():
        p = p / p.name
    if p.is_file():
        if labels is None:
            raise FileNotFoundError(f"edge list {p} needs a label file")
        return load_edge_list_with_labels(p, labels, name)
    nverts = p.parent / f"{p.name}-nverts.txt"
    simplices = p.parent / f"{p.name}-simplices.txt"
    for f in (nverts, simplices):
        if not f.exists():
            raise FileNotFoundError(f"missing dataset file {f}")
    times = p.parent / f"{p.name}-times.txt"
    lab = Path(labels) if labels is not None else _find_labels(p)
    return load_simplex_dataset(nverts, simplices, lab, times if times.exists() else None, name or p.name)


def write_simplex_dataset(bundle: DatasetBundle, prefix) -> Path:
    """Write ``bundle`` in the simplex layout using its external node ids."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    ext = bundle.node_ids
    with open(f"{prefix}-nverts.txt", "w") as fn, open(f"{prefix}-simplices.txt", "w") as fs:
        for r in bundle.stream:
            fn.write(f"{len(r.simplex)}\n")
            for v in r.simplex:
                fs.write(f"{ext[v]}\n")
    if bundle.has_times:
        with open(f"{prefix}-times.txt", "w") as ft:
            for r in bundle.stream:
                ft.write(f"{r.time!r}\n")
    elif os.path.exists(f"{prefix}-times.txt"):
        os.remove(f"{prefix}-times.txt")
    with open(f"{prefix}-node-labels.txt", "w") as fl:
        for i, e in enumerate(ext):
            fl.write(f"{e} {bundle.labeling.label_of(i)}\n")
    return prefix


def example_dataset() -> DatasetBundle:
    """Bundled 8-node example whose triangle homophily is entirely inherited from its edges.

    Two classes of four nodes; six closed triangles, four of them
    homogeneous; three filled triangles, two of them homogeneous.
    """
    root = resources.files("simphom") / "data"
    with resources.as_file(root) as d:
        return load_dataset(Path(d) / "inherited", name="inherited")
