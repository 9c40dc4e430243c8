"""Command-line front end.

Subcommands: generate (spec -> .dst/.svg/.txt), predict (one calibration
query), solve (requirements -> feasibility report), preview (spec -> SVG
on stdout), time (spec -> fabrication minutes), instructions (spec ->
molding sheet). Exit status 0 on success (an infeasible solve is still a
successful solve), 1 on domain errors, 2 on usage errors; diagnostics go
to stderr.

The calibration table is the bundled one, overlaid with the file named by
STIFFSTITCH_CALIBRATION if set, overlaid with --calibration if given.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .calibration import (
    COMPRESSION,
    TABLE_VERSION,
    TENSILE,
    default_table,
    estimate_fabrication_time,
    load_calibration,
    predict_compression,
    predict_tensile,
)
from .dst import write_dst
from .errors import StiffstitchError
from .instructions import render_instructions
from .solver import feasibility_report, solve
from .specfile import build_plan, parse_design_spec, parse_requirements
from .svg import write_svg
from .geometry import validate_design

ENV_CALIBRATION = "STIFFSTITCH_CALIBRATION"


def _load_table(calibration_path: str | None):
    table = default_table()
    env = os.environ.get(ENV_CALIBRATION)
    if env:
        table = table.merge(load_calibration(env))
    if calibration_path:
        table = table.merge(load_calibration(calibration_path))
    return table


def _read_spec(path: str):
    return parse_design_spec(Path(path).read_text(encoding="utf-8"))


def _format_force(pred) -> str:
    s = f"{pred.force_n:.6g}"
    if "." not in s and "e" not in s:
        s += ".0"
    return f"{s} N" + (" (upper bound)" if pred.upper_bound else "")


def _cmd_generate(args) -> int:
    spec = _read_spec(args.spec)
    diagnostics = validate_design(spec.config, spec.thread, spec.fabric)
    for d in diagnostics:
        print(f"{d.severity}: {d.code}: {d.message}", file=sys.stderr)
    if any(d.severity == "error" for d in diagnostics):
        return 1
    plan = build_plan(spec)
    stem = Path(args.spec).with_suffix("")
    dst_path = Path(args.dst) if args.dst else stem.with_suffix(".dst")
    svg_path = Path(args.svg) if args.svg else stem.with_suffix(".svg")
    sheet_path = Path(args.sheet) if args.sheet else stem.with_suffix(".txt")
    dst_path.write_bytes(write_dst(plan, spec.name[:16]))
    svg_path.write_text(write_svg(plan), encoding="utf-8")
    sheet_path.write_text(render_instructions(spec), encoding="utf-8")
    for p in (dst_path, svg_path, sheet_path):
        print(f"wrote {p}")
    return 0


def _cmd_predict(args) -> int:
    table = _load_table(args.calibration)
    if args.mode == COMPRESSION:
        pred = predict_compression(
            args.config, args.fabric, args.displacement, layers=args.layers,
            geometry=args.geometry, extrapolate=args.extrapolate, table=table)
    else:
        pred = predict_tensile(
            args.config, args.fabric, args.displacement, layers=args.layers,
            layer_scaling=args.layer_scaling, extrapolate=args.extrapolate,
            table=table)
    print(_format_force(pred))
    return 0


def _cmd_solve(args) -> int:
    req = parse_requirements(Path(args.requirements).read_text(encoding="utf-8"))
    result = solve(req, table=_load_table(args.calibration))
    print(feasibility_report(result), end="")
    return 0


def _cmd_preview(args) -> int:
    plan = build_plan(_read_spec(args.spec))
    svg = write_svg(plan)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(svg, end="")
    return 0


def _cmd_time(args) -> int:
    spec = _read_spec(args.spec)
    plan = build_plan(spec)
    minutes = estimate_fabrication_time(plan.stitch_count, spec.layers)
    print(f"{minutes:.1f} min")
    return 0


def _cmd_instructions(args) -> int:
    print(render_instructions(_read_spec(args.spec)), end="")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stiffstitch",
        description="Compile embroidery-thermoplastic designs to machine "
                    "files and predict their mechanics.")
    parser.add_argument(
        "--version", action="version",
        version=f"stiffstitch {__version__} (calibration table {TABLE_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate",
                       help="compile a design spec to .dst, .svg and .txt")
    p.add_argument("spec", help="design spec file")
    p.add_argument("--dst", help="stitch file path (default: spec stem + .dst)")
    p.add_argument("--svg", help="preview path (default: spec stem + .svg)")
    p.add_argument("--sheet",
                   help="instruction sheet path (default: spec stem + .txt)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("predict", help="one force prediction")
    p.add_argument("--config", required=True, help="grid id, e.g. L0.66_S1")
    p.add_argument("--fabric", required=True)
    p.add_argument("--displacement", type=float, required=True,
                   help="displacement in mm")
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--mode", choices=(COMPRESSION, TENSILE),
                   default=COMPRESSION)
    p.add_argument("--geometry", default="swatch-100",
                   help="calibration geometry tag (default swatch-100)")
    p.add_argument("--extrapolate", action="store_true",
                   help="clamp queries beyond the calibrated range")
    p.add_argument("--layer-scaling", dest="layer_scaling",
                   action="store_true",
                   help="scale 1-layer tensile data to multiple layers")
    p.add_argument("--calibration", help="extra calibration CSV to overlay")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("solve",
                       help="search the design grid for a requirements file")
    p.add_argument("requirements", help="requirements file")
    p.add_argument("--calibration", help="extra calibration CSV to overlay")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("preview", help="write the SVG preview to stdout")
    p.add_argument("spec", help="design spec file")
    p.add_argument("-o", "--out", help="write to a file instead")
    p.set_defaults(func=_cmd_preview)

    p = sub.add_parser("time", help="estimate fabrication minutes")
    p.add_argument("spec", help="design spec file")
    p.set_defaults(func=_cmd_time)

    p = sub.add_parser("instructions",
                       help="print the molding instruction sheet")
    p.add_argument("spec", help="design spec file")
    p.set_defaults(func=_cmd_instructions)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StiffstitchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
