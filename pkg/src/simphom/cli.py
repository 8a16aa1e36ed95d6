"""Command-line entry point: ``simphom <command> ...``.

Every command prints a short human summary on stdout. ``--out FILE`` writes
the results as CSV, ``--json FILE`` writes them as JSON together with the
run configuration. Exit codes: 0 ok, 2 usage, 3 missing file, 4 undefined
score, 5 parse error, 6 other input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import MissingLabelError, ParseError, SimphomError, UndefinedScoreError
from .homophily import graph_score, hetero_scores, hypergraph_score, simplicial_score
from .io import load_dataset
from .linkpred import BenchmarkConfig, run_benchmark
from .ssbm import DESK_Q1, DESK_SIZES, PAPER_Q1, PAPER_SIZES, sweep_experiment_left, sweep_experiment_right
from .stats import BootstrapSpec, bootstrap_scores, explained_variance

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_UNDEFINED = 4
EXIT_PARSE = 5
EXIT_INPUT = 6

log = logging.getLogger("simphom")


@dataclass
class RunConfig:
    command: str
    args: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------------
# output helpers


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


def write_csv(rows: list[dict], path) -> None:
    fields: list[str] = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    fh = sys.stdout if str(path) == "-" else open(path, "w", newline="")
    try:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k)) for k in fields})
    finally:
        if fh is not sys.stdout:
            fh.close()


def _json_default(o):
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if hasattr(o, "tolist"):
        return o.tolist()
    return str(o)


def _emit(args, rows: list[dict], extra: dict | None = None) -> None:
    if args.out:
        write_csv(rows, args.out)
    if args.json:
        payload = {"config": RunConfig(args.command, _config_args(args)).to_json(), "results": rows}
        if extra:
            payload.update(extra)
        Path(args.json).write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")


def _config_args(args) -> dict:
    skip = {"func", "command", "out", "json", "verbose"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _num(v, digits=4):
    return "undefined" if v is None else f"{float(v):.{digits}f}"


# --------------------------------------------------------------------------
# commands


def _safe_score(fn, *a):
    try:
        return fn(*a)
    except UndefinedScoreError as exc:
        log.warning("%s", exc)
        return None


def cmd_score(args) -> int:
    rows = []
    any_undefined = False
    for path in args.datasets:
        ds = load_dataset(path, args.labels)
        cx = ds.complex() if args.k <= 2 else ds.full_complex(args.k)
        g = args.g or args.k + 1
        simp = _safe_score(simplicial_score, cx, ds.labeling, args.k)
        hyper = _safe_score(hypergraph_score, cx, ds.labeling, g)
        graph = _safe_score(graph_score, cx, ds.labeling)
        any_undefined |= simp is None
        row = {"dataset": ds.name, "k": args.k, "g": g}
        for name, rep in (("graph", graph), ("hypergraph", hyper), ("simplicial", simp)):
            row[f"{name}_score"] = None if rep is None else float(rep.score)
            row[f"{name}_affinity"] = None if rep is None else float(rep.affinity)
            row[f"{name}_baseline"] = None if rep is None else float(rep.baseline)
        rows.append(row)
        print(
            f"{ds.name}: {args.k}-simplicial score {_num(row['simplicial_score'])}  "
            f"hypergraph g={g} score {_num(row['hypergraph_score'])}  "
            f"graph score {_num(row['graph_score'])}"
        )
        if simp is not None:
            print(f"  affinity {simp.homogeneous}/{simp.total}, simplicial baseline "
                  f"{simp.baseline_numerator}/{simp.baseline_denominator}")
    _emit(args, rows)
    return EXIT_UNDEFINED if any_undefined else EXIT_OK


def cmd_hetero(args) -> int:
    ds = load_dataset(args.dataset, args.labels)
    classes = [args.cls] if args.cls is not None else list(ds.labeling.classes)
    if args.cls is not None and args.cls not in ds.labeling.classes:
        # labels parsed from files may be ints
        try:
            classes = [int(args.cls)]
        except ValueError:
            pass
    if args.g is not None:
        data, kw = ds.hypergraph(), {"g": args.g}
    else:
        data = ds.complex() if args.k <= 2 else ds.full_complex(args.k)
        kw = {"k": args.k}
    rows = []
    for c in classes:
        prof = hetero_scores(data, ds.labeling, c, **kw)
        rows.extend(prof.rows())
        if prof.undefined:
            log.info("class %r: undefined entries %s", c, prof.undefined)
    for r in rows:
        line = f"class {r['class']} t={r['t']}: hypergraph {_num(r['hypergraph_score'], 3)}"
        if "simplicial_score" in r:
            line += f"  simplicial {_num(r['simplicial_score'], 3)}"
        print(line)
    _emit(args, rows)
    return EXIT_OK


def cmd_ssbm(args) -> int:
    sizes = tuple(args.sizes) if args.sizes else (PAPER_SIZES if args.paper_scale else DESK_SIZES)
    q1 = args.q1 if args.q1 is not None else (PAPER_Q1 if args.paper_scale else DESK_Q1)
    kw = dict(sizes=sizes, q1=q1, trials=args.trials, seed=args.seed, fill=args.fill)
    if args.ratios:
        kw["ratios"] = tuple(args.ratios)
    points = sweep_experiment_left(**kw) if args.panel == "left" else sweep_experiment_right(**kw)
    rows = [p.as_dict() for p in points]
    for p in points:
        print(f"ratio {p.ratio:g} {p.metric:>10}: {p.mean:.4f} [{p.ci_lo:.4f}, {p.ci_hi:.4f}] n={p.trials}")
    _emit(args, rows)
    return EXIT_OK


def _benchmark_config(args) -> BenchmarkConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
        # accept a bare settings object or the JSON written by `linkpred --json`
        base = base.get("benchmark_config", base)
    allowed = BenchmarkConfig.__dataclass_fields__
    cfg = {k: v for k, v in base.items() if k in allowed}
    for key, val in (("train_fraction", args.train_frac), ("bootstrap_trials", args.trials),
                     ("seed", args.seed), ("l2", args.l2), ("solver", args.solver)):
        if val is not None:
            cfg[key] = val
    return BenchmarkConfig(**cfg)


def cmd_linkpred(args) -> int:
    ds = load_dataset(args.dataset, args.labels)
    cfg = _benchmark_config(args)
    row = run_benchmark(ds.temporal(), cfg)
    d = row.as_dict()
    print(f"{ds.name}: relative AUC-PR without labels {d['without_labels']:.3f} "
          f"[{d['without_labels_ci_lo']:.3f}, {d['without_labels_ci_hi']:.3f}], "
          f"with labels {d['with_labels']:.3f} [{d['with_labels_ci_lo']:.3f}, {d['with_labels_ci_hi']:.3f}]")
    print(f"  training window: 2-simplicial {_num(d['simplicial_score'], 2)}, hypergraph {_num(d['hypergraph_score'], 2)}; "
          f"{d['n_test_candidates']} test candidates, {d['n_test_positives']} positive")
    _emit(args, [d], {"benchmark_config": asdict(cfg)})
    return EXIT_OK


def cmd_bootstrap(args) -> int:
    ds = load_dataset(args.dataset, args.labels)
    cx = ds.complex()
    k = args.k
    classes = list(ds.labeling.classes) if args.cls is None else [args.cls]

    def scores(sub, lab):
        out = {}
        for name, fn, arg in (("simplicial", simplicial_score, k), ("hypergraph", hypergraph_score, k + 1)):
            try:
                out[name] = float(fn(sub, lab, arg).score)
            except SimphomError:
                out[name] = None
        for c in classes:
            try:
                prof = hetero_scores(sub, lab, c, k=k)
            except SimphomError:
                continue
            for t in range(1, k + 2):
                for variant in ("hypergraph", "simplicial"):
                    v = getattr(prof, f"{variant}_score")[t - 1]
                    out[f"{variant}|{c}|{t}"] = None if v is None or v == math.inf else float(v)
        return out

    full = scores(cx, ds.labeling)
    spec = BootstrapSpec(args.trials, args.fraction, args.seed)
    res = bootstrap_scores(cx, ds.labeling, spec, scores)
    rows = []
    for key in sorted(res.std):
        parts = key.split("|")
        rows.append({
            "quantity": parts[0],
            "class": parts[1] if len(parts) > 1 else None,
            "t": int(parts[2]) if len(parts) > 2 else None,
            "score": full.get(key),
            "std": res.std[key],
            "missing": res.missing[key],
            "trials": spec.trials,
            "fraction": spec.node_fraction,
        })
    for r in rows:
        if r["class"] is None:
            print(f"{r['quantity']}: {_num(r['score'])} +/- {r['std']:.4f} ({r['missing']} missing of {spec.trials})")
    print(f"{len(rows)} quantities, node fraction {spec.node_fraction}, {spec.trials} trials")
    _emit(args, rows)
    return EXIT_OK


def _read_score_table(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ParseError(f"{path}: no rows")
    return rows


def cmd_explained(args) -> int:
    table = _read_score_table(args.table)
    targets = ["hypergraph", "simplicial"] if args.target == "both" else [args.target]
    rows = []
    for target in targets:
        col = f"{target}_score"
        pairs = []
        for i, r in enumerate(table, start=2):
            if "graph_score" not in r or col not in r:
                raise ParseError(f"{args.table}: needs columns graph_score and {col}")
            try:
                g = float(r["graph_score"]) if r["graph_score"] else None
                t = float(r[col]) if r[col] else None
            except ValueError:
                raise ParseError(f"{args.table}:{i}: non-numeric score") from None
            pairs.append((r.get("dataset", f"row{i}"), g, t))
        res = explained_variance(pairs)
        rows.append({"target": target, **res.as_dict()})
        print(f"log {target} ~ log graph: slope {res.slope:.3f}, r^2 {res.r_squared:.3f}, p {res.p_value:.3g}, N={res.n}")
    _emit(args, rows)
    return EXIT_OK


def cmd_stats(args) -> int:
    rows = []
    for path in args.datasets:
        ds = load_dataset(path, args.labels)
        rows.append({"dataset": ds.name, **ds.summary()})
    print(f"{'dataset':<24}{'nodes':>10}{'classes':>9}{'edges':>12}{'triangles':>12}{'time steps':>12}")
    for r in rows:
        ts = "-" if r["time_steps"] is None else f"{r['time_steps']:,}"
        print(f"{r['dataset']:<24}{r['nodes']:>10,}{r['classes']:>9}{r['edges']:>12,}{r['triangles']:>12,}{ts:>12}")
    _emit(args, rows)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="simphom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, dataset=True, many=False):
        if dataset:
            if many:
                sp.add_argument("datasets", nargs="+", help="dataset prefix or edge-list file")
            else:
                sp.add_argument("dataset", help="dataset prefix or edge-list file")
            sp.add_argument("--labels", help="node label file (default: <prefix>-node-labels.txt)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write results as CSV ('-' for stdout)")
        sp.add_argument("--json", help="write results and run config as JSON")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("score", help="homogeneous homophily scores")
    common(sp, many=True)
    sp.add_argument("--k", type=int, default=2, help="simplex dimension (default 2: triangles)")
    sp.add_argument("--g", type=int, help="hypergraph group size (default k+1)")
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("hetero-score", help="type-t scores per class")
    common(sp)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--g", type=int, help="use hyperedges of exactly this size instead of the complex")
    sp.add_argument("--class", dest="cls", help="single class (default: all)")
    sp.set_defaults(func=cmd_hetero)

    sp = sub.add_parser("ssbm-sweep", help="simplicial SBM sweep (CSV for plotting)")
    common(sp, dataset=False)
    sp.add_argument("--panel", choices=("left", "right"), required=True,
                    help="left: vary p1/q1 at p2=q2; right: vary p2/q2 at p1=4 q1")
    sp.add_argument("--trials", type=int, default=30)
    sp.add_argument("--ratios", type=float, nargs="+")
    sp.add_argument("--sizes", type=int, nargs="+")
    sp.add_argument("--q1", type=float)
    sp.add_argument("--fill", type=float, default=0.5, help="largest triangle-fill probability")
    sp.add_argument("--paper-scale", action="store_true", help="1000/1000 communities")
    sp.set_defaults(func=cmd_ssbm)

    sp = sub.add_parser("linkpred", help="triangle-closure prediction with and without labels")
    common(sp)
    sp.add_argument("--config", help="JSON file with benchmark settings")
    sp.add_argument("--train-frac", type=float)
    sp.add_argument("--trials", type=int, help="bootstrap trials for CIs")
    sp.add_argument("--l2", type=float)
    sp.add_argument("--solver", choices=("newton", "gd"))
    sp.set_defaults(func=cmd_linkpred, seed=None)

    sp = sub.add_parser("bootstrap", help="node-subsampling error bars")
    common(sp)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--fraction", type=float, default=0.8)
    sp.add_argument("--class", dest="cls")
    sp.set_defaults(func=cmd_bootstrap)

    sp = sub.add_parser("explained-variance", help="log-log regression of scores on graph homophily")
    common(sp, dataset=False)
    sp.add_argument("table", help="CSV with dataset, graph_score and <target>_score columns (as written by 'score')")
    sp.add_argument("--target", choices=("hypergraph", "simplicial", "both"), default="both")
    sp.set_defaults(func=cmd_explained)

    sp = sub.add_parser("stats", help="dataset summary table")
    common(sp, many=True)
    sp.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except UndefinedScoreError as exc:
        print(f"error: undefined score: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MissingLabelError, SimphomError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
