"""Command-line entry point: ``knotforge generate|anneal|analyze|hull|batch``."""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from .anneal import AnnealParams, anneal
from .exceptions import DegenerateEmbeddingError, DegenerateHullError, KnotforgeError
from .generators import TorusParams, hopf_chain, torus_knot
from .hull import convex_hull, export_mesh, tube_cloud
from .io import TraceWriter, read_trace_csv, read_vect, write_minima_json, write_vect
from .metrics import find_local_minima
from .thickness import normalize_to_unit_thickness, ropelength

log = logging.getLogger("knotforge")

ANALYZED_METRICS = ("point_hull", "tube_hull", "cross_section")


@dataclass
class RunConfig:
    """One run. Exactly one of ``torus``, ``hopf`` or ``input`` names the knot.

    Runs are always deterministic; there is no seed.
    """

    torus: tuple = None
    hopf: str = None
    input: str = None
    n: int = None
    rings: int = 20
    out: str = "."
    anneal: dict = field(default_factory=dict)
    metrics: tuple = ANALYZED_METRICS
    smoothing: int = 5

    def __post_init__(self):
        sources = [s for s in (self.torus, self.hopf, self.input) if s]
        if len(sources) != 1:
            raise KnotforgeError("specify exactly one of --torus, --hopf or --input")
        if isinstance(self.torus, str):
            self.torus = _parse_torus(self.torus)

    def knot(self):
        if self.input:
            return read_vect(self.input)
        if self.hopf:
            return hopf_chain(self.hopf, self.n or 400)
        p, q = self.torus
        return torus_knot(TorusParams.standard(p, q, self.n), name=f"T{p}_{q}")

    @property
    def label(self):
        if self.input:
            return Path(self.input).stem
        if self.hopf:
            return f"hopf_{self.hopf}"
        return f"T{self.torus[0]}_{self.torus[1]}"

    def anneal_params(self):
        return AnnealParams(ring_count=self.rings, **self.anneal)

    def outdir(self):
        out = Path(self.out)
        out.mkdir(parents=True, exist_ok=True)
        return out


def _parse_torus(text):
    try:
        p, q = (int(v) for v in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--torus expects P,Q, got {text!r}") from None
    return p, q


_ANNEAL_FLAGS = {
    "delta": "shrink_step",
    "max_iters": "max_iterations",
    "checkpoint_every": "checkpoint_every",
    "stop_tol": "stop_rel_tol",
    "stop_window": "stop_window",
    "passes": "overlap_passes",
}


def _config(args):
    """Merge the optional JSON config file with flags; flags win."""
    data = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
    anneal_opts = dict(data.pop("anneal", {}))
    for flag, name in _ANNEAL_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            anneal_opts[name] = value
    if getattr(args, "equilateralize", False):
        anneal_opts["equilateralize"] = True
    for key in ("torus", "hopf", "input", "n", "rings", "out"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise KnotforgeError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(anneal=anneal_opts, **data)


def cmd_generate(cfg):
    link = cfg.knot()
    path = write_vect(link, cfg.outdir() / f"{cfg.label}.vect")
    print(f"wrote {path} ({link.n_components} component(s), {sum(link.counts)} vertices)")
    return 0


def run_anneal(cfg):
    """Anneal one configured knot; returns (trace path, final VECT path)."""
    out = cfg.outdir()
    link = cfg.knot()
    trace_path = out / f"{cfg.label}_trace.csv"
    with TraceWriter(trace_path) as writer:
        trace = anneal(link, cfg.anneal_params(), provenance=cfg.label, on_checkpoint=writer)
    final_path = write_vect(trace.final_link, out / f"{cfg.label}_final.vect")
    return trace_path, final_path, trace


def cmd_anneal(cfg):
    trace_path, final_path, trace = run_anneal(cfg)
    last = trace.records[-1]
    print(
        f"{cfg.label}: {len(trace.records)} checkpoints, {trace.iterations} iterations "
        f"({trace.stopped_by}), ropelength {last.ropelength:.4f}"
    )
    print(f"wrote {trace_path}\nwrote {final_path}")
    return 0


def summarize(label, trace, metrics=ANALYZED_METRICS, smoothing=5):
    """Minima reports per metric and the summary-table row of one trace."""
    reports = {m: find_local_minima(trace, m, smoothing) for m in metrics}
    hulls = [r.tube_hull for r in trace.records if r.tube_hull > 0]
    points = [r.point_hull for r in trace.records if r.point_hull > 0]
    row = {
        "knot": label,
        "final_ropelength": trace.records[-1].ropelength,
        "min_point_hull": min(points) if points else 0.0,
        "min_tube_hull": min(hulls) if hulls else 0.0,
    }
    for m, rep in reports.items():
        row[f"{m}_global_min_is_final"] = rep.global_min_is_final
    if "tube_hull" in reports:
        row["counterexample"] = not reports["tube_hull"].global_min_is_final
    return reports, row


def format_table(rows):
    if not rows:
        return ""
    cols = list(rows[0])
    cells = [[f"{r[c]:.4f}" if isinstance(r[c], float) else str(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def cmd_analyze(traces, out, metrics=ANALYZED_METRICS, smoothing=5):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for path in traces:
        path = Path(path)
        label = path.stem.removesuffix("_trace")
        reports, row = summarize(label, read_trace_csv(path), metrics, smoothing)
        write_minima_json(reports, out / f"{label}_minima.json")
        rows.append(row)
    table = format_table(rows)
    (out / "summary.txt").write_text(table, encoding="ascii")
    sys.stdout.write(table)
    return 0


def cmd_hull(cfg):
    link = read_vect(cfg.input) if cfg.input else cfg.knot()
    link = normalize_to_unit_thickness(link)
    out = cfg.outdir()
    point = convex_hull(link.points)
    tube = convex_hull(tube_cloud(link, cfg.rings).points)
    p1 = export_mesh(point, out / f"{cfg.label}_point_hull.obj")
    p2 = export_mesh(tube, out / f"{cfg.label}_tube_hull.obj")
    print(f"ropelength {ropelength(link):.4f}\nwrote {p1}\nwrote {p2}")
    return 0


def _batch_job(cfg):
    trace_path, _, trace = run_anneal(cfg)
    return cfg.label, str(trace_path)


def worker_count(requested=None):
    """Worker slots, capped by the KNOTFORGE_THREADS environment variable."""
    cap = os.environ.get("KNOTFORGE_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def cmd_batch(config_path, out, workers=None):
    """Anneal every run listed in a JSON file (``{"runs": [{...}, ...]}``)."""
    spec = json.loads(Path(config_path).read_text())
    defaults = spec.get("defaults", {})
    cfgs = []
    for run in spec["runs"]:
        merged = {**defaults, **run, "out": str(out)}
        merged["anneal"] = {**defaults.get("anneal", {}), **run.get("anneal", {})}
        cfgs.append(RunConfig(**merged))
    n = worker_count(workers)
    if n == 1:
        results = [_batch_job(c) for c in cfgs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_batch_job, cfgs))
    return cmd_analyze([path for _, path in results], out, smoothing=cfgs[0].smoothing if cfgs else 5)


def _add_source(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--torus", type=_parse_torus, metavar="P,Q", help="torus knot T(P,Q)")
    src.add_argument("--hopf", choices=("elongated", "compact"), help="three-component Hopf chain")
    src.add_argument("--input", metavar="PATH", help="VECT file")
    p.add_argument("--n", type=int, metavar="COUNT", help="vertices (per component)")
    p.add_argument("--rings", type=int, metavar="COUNT", help="points per tube ring (default 20)")
    p.add_argument("--out", metavar="DIR", help="output directory (default .)")
    p.add_argument("--config", metavar="FILE", help="JSON run config; flags override it")


def build_parser():
    parser = argparse.ArgumentParser(prog="knotforge", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an initial configuration as VECT")
    _add_source(gen)

    ann = sub.add_parser("anneal", help="tighten a knot; writes trace CSV and final VECT")
    _add_source(ann)
    ann.add_argument("--delta", type=float, help="shrink step (default 0.01)")
    ann.add_argument("--max-iters", type=int, dest="max_iters")
    ann.add_argument("--checkpoint-every", type=int, dest="checkpoint_every")
    ann.add_argument("--stop-tol", type=float, dest="stop_tol")
    ann.add_argument("--stop-window", type=int, dest="stop_window")
    ann.add_argument("--passes", type=int, help="overlap repair passes per iteration")
    ann.add_argument("--equilateralize", action="store_true")

    ana = sub.add_parser("analyze", help="local minima of trace CSVs; writes JSON and a summary")
    ana.add_argument("traces", nargs="+", metavar="TRACE.csv")
    ana.add_argument("--out", default=".", metavar="DIR")
    ana.add_argument("--smoothing", type=int, default=5)
    ana.add_argument("--metrics", default=",".join(ANALYZED_METRICS))

    hull = sub.add_parser("hull", help="export point and tube hull meshes")
    _add_source(hull)

    batch = sub.add_parser("batch", help="anneal several knots from a JSON run list")
    batch.add_argument("config", metavar="RUNS.json")
    batch.add_argument("--out", default=".", metavar="DIR")
    batch.add_argument("--workers", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "analyze":
            metrics = tuple(m for m in args.metrics.split(",") if m)
            return cmd_analyze(args.traces, args.out, metrics, args.smoothing)
        if args.command == "batch":
            return cmd_batch(args.config, args.out, args.workers)
        cfg = _config(args)
        handler = {"generate": cmd_generate, "anneal": cmd_anneal, "hull": cmd_hull}[args.command]
        return handler(cfg)
    except (DegenerateEmbeddingError, DegenerateHullError) as exc:
        print(f"knotforge: degenerate geometry: {exc}", file=sys.stderr)
        return 3
    except (KnotforgeError, OSError, ValueError) as exc:
        print(f"knotforge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
