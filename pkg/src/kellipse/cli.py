"""Command-line front end.

Subcommands:
    trace <scene> -o out.svg [--csv out.csv]     extract the level curve/cloud
    verify <scene> --theorem t1..t5 [--report p] check fixed-figure conditions
    median <scene>                               minimum radius and its argmin
    fixpoints <scene>                            exact fixed set and radii
    axioms <scene> [--samples N]                 metric axiom check

Exit codes: 0 success/Pass, 1 condition Fail, 2 usage or scene error,
3 solver error. KELLIPSE_THREADS caps tracer workers; --seed overrides the
scene seed.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .geometry import SolverError, min_radius
from .metric import verify_metric_axioms
from .piecewise import fixed_kellipse_radii, fixed_point_set
from .scene import Scene, SceneError, load_scene
from .tracer import export_csv, export_svg, sample_3d, trace_2d
from .verifier import FAIL, THEOREM_FAMILIES, certify, check_identity_condition


def fmt_num(v) -> str:
    """Exact, deterministic rendering: ints and fractions verbatim, floats via repr."""
    if v is None:
        return "-"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(float(v))
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def fmt_point(p) -> str:
    if len(p) == 1:
        return fmt_num(p[0])
    return "(" + ", ".join(fmt_num(c) for c in p) + ")"


def _json_num(v):
    if v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float) and math.isfinite(v):
        return float(v)
    return fmt_num(v)      # Fraction / inf render as strings


def report_to_dict(rep) -> dict:
    return {
        "condition": rep.condition_id,
        "verdict": rep.verdict,
        "fitted_constant": _json_num(rep.fitted_constant),
        "worst_margin": _json_num(rep.worst_margin),
        "witness": [[_json_num(c) for c in p] for p in rep.witness],
        "exhaustive": rep.exhaustive,
        "exact": rep.exact,
        "notes": rep.notes,
    }


def _load(path: str) -> Scene:
    return load_scene(path)


def cmd_trace(args) -> int:
    scene = _load(args.scene)
    if scene.trace is None:
        raise SceneError(f"scene {scene.name!r} has no trace config")
    e = scene.ellipse
    if scene.space.dimension == 2:
        result = trace_2d(e, scene.trace)
        svg = export_svg(result.polylines, foci=e.foci, bbox=scene.trace.bbox)
        points = result.all_vertices()
        n = sum(len(p) for p in result.polylines)
        what = f"{len(result.polylines)} polyline(s), {n} vertices"
    elif scene.space.dimension == 3:
        result = sample_3d(e, scene.trace)
        points = result.points
        xy = [(float(p[0]), float(p[1])) for p in points]
        svg = export_svg([], foci=[(float(f[0]), float(f[1])) for f in e.foci],
                         bbox=scene.trace.bbox[:2])
        # a 3D cloud renders as projected dots appended to the base document
        dots = "\n".join(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="0.8" fill="#1f4e8c"/>'
                         for x, y in _project(xy, scene.trace.bbox[:2]))
        svg = svg.replace("</svg>", dots + "\n</svg>")
        what = f"cloud of {len(points)} points"
    else:
        raise SceneError("trace requires a 2D or 3D continuum scene")

    Path(args.output).write_text(svg, encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(export_csv(points), encoding="utf-8")
    if result.boundary_warning:
        print("warning: the curve touches the bbox boundary", file=sys.stderr)
    print(f"traced {what} -> {args.output}")
    return 0


def _project(xy, bbox):
    (x0, x1), (y0, y1) = bbox
    w = 640
    pad = 0.05 * max(x1 - x0, y1 - y0)
    sx = w / (x1 - x0 + 2 * pad)
    return [((x - x0 + pad) * sx, (y1 + pad - y) * sx) for x, y in xy]


def cmd_verify(args) -> int:
    scene = _load(args.scene)
    if scene.self_map is None:
        raise SceneError(f"scene {scene.name!r} has no self-map")
    theorem = (args.theorem or scene.theorem or "t1").lower()
    e = scene.ellipse
    plan = scene.build_plan(seed=args.seed)

    if theorem == "t5":
        rep = check_identity_condition(scene.self_map, e.field, len(e.foci), plan)
        reports = {"Ik": rep}
        summary = {
            "scene": scene.name,
            "theorem": "t5",
            "family": "identity-forcing",
            "plan": {"on": len(plan.on_ellipse), "off": len(plan.off_ellipse),
                     "exhaustive": plan.exhaustive, "exact": plan.exact},
            "conditions": [report_to_dict(rep)],
            "passed": rep.verdict != FAIL,
        }
        failed = rep.verdict == FAIL
    elif theorem in THEOREM_FAMILIES:
        verdict = certify(theorem, scene.self_map, e, plan)
        reports = verdict.reports
        summary = {
            "scene": scene.name,
            "theorem": theorem,
            "family": verdict.family,
            "plan": {"on": len(plan.on_ellipse), "off": len(plan.off_ellipse),
                     "exhaustive": plan.exhaustive, "exact": plan.exact},
            "conditions": [report_to_dict(r) for r in reports.values()],
            "existence_certified": verdict.existence_certified,
            "uniqueness_certified": verdict.uniqueness_certified,
            "qualifier": verdict.qualifier,
        }
        failed = any(r.verdict == FAIL for r in reports.values())
    else:
        raise SceneError(f"unknown theorem {theorem!r} (choose t1..t5)")

    for rep in reports.values():
        extra = ""
        if rep.fitted_constant is not None:
            extra = f"  fitted={fmt_num(rep.fitted_constant)}"
        if rep.witness:
            extra += "  witness=" + ", ".join(fmt_point(p) for p in rep.witness)
        print(f"{rep.condition_id:8s} {rep.verdict:8s} margin={fmt_num(rep.worst_margin)}{extra}")
    if "existence_certified" in summary:
        print(f"existence: {'certified' if summary['existence_certified'] else 'NOT certified'} "
              f"({summary['qualifier']})")
        print(f"uniqueness: {'certified' if summary['uniqueness_certified'] else 'NOT certified'} "
              f"({summary['qualifier']})")

    if args.report:
        Path(args.report).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return 1 if failed else 0


def cmd_median(args) -> int:
    scene = _load(args.scene)
    r_star, argmin = min_radius(scene.ellipse.field)
    print(f"({fmt_num(r_star)}, {fmt_point(argmin)})")
    return 0


def cmd_fixpoints(args) -> int:
    scene = _load(args.scene)
    if scene.piecewise is None:
        raise SceneError(f"scene {scene.name!r} has no piecewise map")
    fix = fixed_point_set(scene.piecewise)
    print(f"Fix = {fix}")
    if scene.ellipses:
        foci = [f[0] for f in scene.ellipse.foci]
        radii = fixed_kellipse_radii(scene.piecewise, foci)
        print(f"radii = {radii}")
    return 0


def cmd_axioms(args) -> int:
    scene = _load(args.scene)
    report = verify_metric_axioms(scene.space, args.samples, seed=args.seed or scene.seed)
    print(f"metric {report.metric.label}: {report.sample_count} triples, "
          f"{len(report.violations)} violation(s)")
    for v in report.violations[:20]:
        pts = ", ".join(fmt_point(p) for p in v.points)
        print(f"  {v.axiom}: {pts} (amount {v.amount:g})")
    return 0 if report.ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kellipse",
        description="k-ellipse level sets, tracing, and fixed-figure verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="extract the level curve (SVG) or cloud (CSV)")
    p.add_argument("scene")
    p.add_argument("-o", "--output", required=True, help="output SVG path")
    p.add_argument("--csv", help="also write vertices/points as CSV")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", help="check one condition family on the scene")
    p.add_argument("scene")
    p.add_argument("--theorem", choices=["t1", "t2", "t3", "t4", "t5"],
                   help="condition family (default: scene's, then t1)")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--seed", type=int, help="override the scene seed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("median", help="minimum radius and geometric median")
    p.add_argument("scene")
    p.set_defaults(func=cmd_median)

    p = sub.add_parser("fixpoints", help="exact fixed set and admissible radii")
    p.add_argument("scene")
    p.set_defaults(func=cmd_fixpoints)

    p = sub.add_parser("axioms", help="check the metric axioms on samples")
    p.add_argument("scene")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, help="override the scene seed")
    p.set_defaults(func=cmd_axioms)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
