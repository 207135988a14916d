"""Command line front end.

Subcommands read a bundle (``--bundle``) and/or single documents
(``--complex``, ``--metric``, ``--target``, ``--map``), print one JSON report
to stdout (or ``--report``) and exit with 0 on success, 1 when a check or a
flow fails, and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import glob
import io as _io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .io import Bundle, InputError, dumps, export_obj, load_bundle, write_json
from .metric import induced_quasimetric, simplicial_area, validate_metric
from .smap import (
    CollapseError,
    collapse_zero_subcomplex,
    energy2,
    energy_forms,
    riemannian_area,
    simplicial_area_of_map,
    stretch_factors,
    volume2,
    volume2_metric,
)
from .solver import (
    CONVERGED,
    FlowConfig,
    FlowError,
    flow_family,
    flow_to_harmonic,
    minimize_over_metrics,
)
from .targets import Euclidean, Genus2Octagon, MetricTree
from . import verify as V

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunManifest:
    """Everything that determines a run; echoed into every report."""

    command: str
    inputs: dict
    overrides: dict = field(default_factory=dict)
    seed: int = 0
    out_dir: str | None = None

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "overrides": self.overrides,
                "seed": self.seed, "out_dir": self.out_dir}


class UsageError(Exception):
    pass


def _parse_fixed(text: str | None):
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--fixed expects a comma-separated vertex list, got {text!r}") from exc


def _inputs(args) -> Bundle:
    return load_bundle(bundle=args.bundle, complex=args.complex, metric=args.metric,
                       target=args.target, map=args.map, fixed=_parse_fixed(getattr(args, "fixed", None)))


def _manifest(args, **overrides) -> RunManifest:
    inputs = {k: getattr(args, k) for k in ("bundle", "complex", "metric", "target", "map")
              if getattr(args, k, None) is not None}
    return RunManifest(args.command, inputs, {k: v for k, v in overrides.items() if v is not None},
                       args.seed, getattr(args, "out_dir", None))


def _emit(args, report: dict) -> None:
    text = dumps(report)
    if getattr(args, "report", None):
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _metric_or_induced(b: Bundle):
    if b.metric is not None:
        return b.metric
    b.require("map")
    return induced_quasimetric(b.complex, b.map)


def _flow_config(args, b: Bundle) -> FlowConfig:
    return FlowConfig(grad_tol=args.tol, max_iters=args.max_iters, fixed_vertices=frozenset(b.fixed))


def _area_monitor(b: Bundle):
    # genus-2 traces also carry the Riemannian area of every iterate
    return riemannian_area if isinstance(b.target, Genus2Octagon) else None


def _write_trace(path: Path, report) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "energy", "grad_norm", "step"] + (["riemannian_area"] if report.monitor else []))
    for row in report.csv_rows():
        w.writerow([row[0]] + [repr(float(x)) for x in row[1:]])
    path.write_text(buf.getvalue(), encoding="utf-8")


# -- subcommands ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    b = _inputs(args)
    b.require("complex")
    K = b.complex
    rep = validate_metric(K, _metric_or_induced(b))
    report = {
        "manifest": _manifest(args).to_json(),
        "complex": {"vertices": K.n_vertices, "edges": K.n_edges, "faces": K.n_faces, "mode": K.mode,
                    "euler_characteristic": K.euler_characteristic() if K.mode == "surface" else None,
                    "closed": K.is_closed()},
        "metric": rep.to_json(),
    }
    _emit(args, report)
    return EXIT_OK if rep.valid else EXIT_FAIL


def cmd_energy(args) -> int:
    b = _inputs(args)
    b.require("complex", "map")
    K, f = b.complex, b.map
    l = _metric_or_induced(b)
    E_corner, E_edge = energy_forms(f, l)
    infinite = math.isinf(E_corner)
    rel = 0.0 if infinite or E_corner == 0 else abs(E_corner - E_edge) / abs(E_corner)
    out = {
        "status": "infinite" if infinite else "finite",
        "energy_corner": E_corner,
        "energy_edge": E_edge,
        "energy_form_rel_diff": rel,
        "area_of_map": simplicial_area_of_map(f),
        "area_of_metric": simplicial_area(K, l),
        "riemannian_area": riemannian_area(f),
        "stretch": stretch_factors(f, l).stats(),
    }
    if K.mode == "skeleton":
        out["energy2"] = energy2(f, l)
        out["volume2"] = volume2(f)
        out["volume2_metric"] = volume2_metric(K, l)
    _emit(args, {"manifest": _manifest(args).to_json(), "energy": out})
    return EXIT_OK


def _save_map(path: Path, b: Bundle, f, l) -> None:
    doc = Bundle(b.complex, l, f.target, f, b.fixed).to_json()
    write_json(path, doc)


def cmd_flow(args) -> int:
    b = _inputs(args)
    b.require("complex", "map")
    cfg = _flow_config(args, b)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _manifest(args, tol=args.tol, max_iters=args.max_iters, fixed=_parse_fixed(args.fixed),
                         family=args.family, warm_start=args.warm_start or None)
    if args.family:
        paths = sorted(glob.glob(args.family))
        if not paths:
            raise UsageError(f"--family pattern {args.family!r} matched no files")
        samples = [load_bundle(bundle=args.bundle, complex=args.complex, target=args.target, map=p)
                   for p in paths]
        maps = [s.map for s in samples]
        metrics = [b.metric] * len(maps) if b.metric is not None else None
        res = flow_family(maps, metrics, cfg, warm_start=args.warm_start)
        entries = []
        for k, (g, rep) in enumerate(zip(res.maps, res.reports)):
            l = b.metric if b.metric is not None else induced_quasimetric(g.complex, maps[k])
            _save_map(out_dir / f"map_{k:03d}.json", b, g, l)
            _write_trace(out_dir / f"trace_{k:03d}.csv", rep)
            entries.append({"input": paths[k], **rep.to_json()})
        ok = all(r.reason == CONVERGED for r in res.reports)
        _emit(args, {"manifest": manifest.to_json(), "family": entries,
                     "adjacent_distances": res.adjacent_distances})
        return EXIT_OK if ok else EXIT_FAIL
    l = _metric_or_induced(b)
    g, rep = flow_to_harmonic(b.map, l, cfg, monitor=_area_monitor(b))
    _save_map(out_dir / "map.json", b, g, l)
    _write_trace(out_dir / "trace.csv", rep)
    flow = rep.to_json()
    flow["riemannian_area"] = riemannian_area(g)
    _emit(args, {"manifest": manifest.to_json(), "flow": flow})
    return EXIT_OK if rep.reason == CONVERGED else EXIT_FAIL


def cmd_optimize_metric(args) -> int:
    b = _inputs(args)
    b.require("complex", "map")
    cfg = _flow_config(args, b)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    g, l, trace = minimize_over_metrics(b.map, b.complex, args.outer_tol, cfg, args.max_outer)
    _save_map(out_dir / "map.json", b, g, l)
    (out_dir / "area_trace.csv").write_text(
        "outer,area\n" + "".join(f"{k},{a!r}\n" for k, a in enumerate(trace.areas)), encoding="utf-8")
    result = {
        "reason": trace.reason,
        "areas": trace.areas,
        "monotone": trace.is_monotone(),
        "energy_equals_area": trace.energy_equals_area,
    }
    zero = np.flatnonzero(l.lengths == 0)
    if zero.size:
        suggestion = {"zero_edges": [int(e) for e in zero]}
        try:
            K2, l2, g2, crep = collapse_zero_subcomplex(b.complex, l, g, report=True)
            _save_map(out_dir / "collapsed.json", Bundle(K2, fixed=[]), g2, l2)
            suggestion["collapse"] = crep.to_json()
        except CollapseError as exc:
            suggestion["collapse_error"] = str(exc)
        result["collapse_suggestion"] = suggestion
    _emit(args, {"manifest": _manifest(args, outer_tol=args.outer_tol).to_json(), "optimize": result})
    ok = trace.reason == CONVERGED and trace.is_monotone()
    return EXIT_OK if ok else EXIT_FAIL


CHECKS = ("E_ge_A", "mean_value", "convex_hull", "max_principle", "area_bound", "angle_sums", "embedding")


def _applicable(name: str, b: Bundle) -> bool:
    T, K = b.target, b.complex
    tree = isinstance(T, MetricTree)
    if name == "E_ge_A":
        return True
    if name == "mean_value":
        return isinstance(T, Euclidean) and K.mode == "surface"
    if name == "convex_hull":
        return not tree and K.mode == "surface"
    if name == "max_principle":
        return type(T) is Euclidean and T.dim == 1
    if name == "area_bound":
        return not tree and K.mode == "surface"
    if name in ("angle_sums", "embedding"):
        return not tree and T.dim == 2 and K.mode == "surface"
    return False


def _run_check(name: str, f, l, b: Bundle, args):
    fixed = b.fixed if b.fixed else None
    if name == "E_ge_A":
        return V.check_E_ge_A(f, l)
    if name == "mean_value":
        return V.check_mean_value(f, l, 10 * args.tol, fixed)
    if name == "convex_hull":
        return V.check_convex_hull(f, l, fixed=fixed)
    if name == "max_principle":
        return V.check_max_principle(f, l, fixed)
    if name == "area_bound":
        return V.check_area_bound(f, l=l)
    if name == "angle_sums":
        return V.check_vertex_angle_sums(f, "immersion")
    return V.check_embedding(f)


def cmd_verify(args) -> int:
    b = _inputs(args)
    b.require("complex", "map")
    if args.checks:
        names = [c.strip() for c in args.checks.split(",") if c.strip()]
        unknown = [c for c in names if c not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s): {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    else:
        names = [c for c in CHECKS if _applicable(c, b)]
    l = _metric_or_induced(b)
    f = b.map
    flow = None
    if args.flow:
        f, rep = flow_to_harmonic(f, l, FlowConfig(grad_tol=args.tol, fixed_vertices=frozenset(b.fixed)))
        flow = rep.to_json()
    results = [_run_check(n, f, l, b, args) for n in names]
    report = {"manifest": _manifest(args, checks=args.checks, flow=args.flow or None).to_json(),
              "checks": [r.to_json() for r in results], "all_passed": all(r.passed for r in results)}
    if flow is not None:
        report["flow"] = flow
    _emit(args, report)
    return EXIT_OK if report["all_passed"] else EXIT_FAIL


def cmd_export_obj(args) -> int:
    b = _inputs(args)
    b.require("complex", "map")
    text = export_obj(b.map)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, report: bool = True) -> None:
    p.add_argument("--bundle", help="JSON bundle with complex/metric/target/map/fixed sections")
    p.add_argument("--complex", help="complex JSON")
    p.add_argument("--metric", help="metric JSON")
    p.add_argument("--target", help="target JSON or short spec such as 'hyperbolic(2)'")
    p.add_argument("--map", help="map JSON")
    p.add_argument("--seed", type=int, default=0, help="seed for any randomised step")
    if report:
        p.add_argument("--report", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simpharm", description="Simplicial energy and harmonic maps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check complex invariants and metric inequalities")
    _common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("energy", help="energies, areas and stretch statistics of a map")
    _common(p)
    p.set_defaults(func=cmd_energy)

    for name, func, helptext in (("flow", cmd_flow, "flow a map to a simplicial harmonic map"),
                                 ("optimize-metric", cmd_optimize_metric,
                                  "alternate metric updates and harmonic flows")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--tol", type=float, default=1e-8, help="gradient sup-norm tolerance")
        p.add_argument("--max-iters", type=int, default=100_000)
        p.add_argument("--fixed", help="comma-separated fixed vertex ids (overrides the bundle)")
        p.add_argument("--out-dir", default=".", help="directory for output maps and traces")
        if name == "flow":
            p.add_argument("--family", help="glob of map files forming a one-parameter family")
            p.add_argument("--warm-start", action="store_true", help="start each sample from the previous result")
        else:
            p.add_argument("--outer-tol", type=float, default=1e-10)
            p.add_argument("--max-outer", type=int, default=100)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run property checks")
    _common(p)
    p.add_argument("--checks", help=f"comma-separated subset of {', '.join(CHECKS)}")
    p.add_argument("--flow", action="store_true", help="flow to a harmonic map before checking")
    p.add_argument("--tol", type=float, default=1e-8, help="gradient tolerance for --flow and mean value")
    p.add_argument("--fixed", help="comma-separated fixed vertex ids (overrides the bundle)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-obj", help="write the image surface as Wavefront OBJ")
    _common(p, report=False)
    p.add_argument("--out", help="output .obj path (default stdout)")
    p.set_defaults(func=cmd_export_obj)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, UsageError, FlowError, json.JSONDecodeError) as exc:
        print(f"simpharm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
