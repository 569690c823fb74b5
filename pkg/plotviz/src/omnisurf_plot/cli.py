"""omnisurf-plot: render pattern and sweep CSVs to image files."""

from __future__ import annotations

import argparse
import sys

from .pattern import PatternFigureSpec, PlotInputError, render_pattern
from .sweep import render_sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omnisurf-plot",
        description="Render omnisurf CSV outputs into figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="polar heatmaps and principal cuts")
    p.add_argument(
        "--in", dest="inputs", required=True,
        help="pattern CSV path(s), comma-separated for two hemispheres",
    )
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument(
        "--cut", default="0",
        help="comma-separated cut-plane phi values in degrees (default 0)",
    )
    p.add_argument(
        "--floor", type=float, default=-40.0, help="dB floor (default -40)"
    )

    s = sub.add_parser("sweep", help="line plot over a gain/sweep CSV")
    s.add_argument("--in", dest="inputs", required=True, help="CSV path")
    s.add_argument("--out", required=True, help="output image path")
    s.add_argument("--x", default="sweep_value", help="x column name")
    s.add_argument("--y", default="h_abs_db", help="y column name")
    s.add_argument("--log-x", action="store_true", help="logarithmic x axis")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    try:
        if args.command == "pattern":
            spec = PatternFigureSpec(
                inputs=tuple(p.strip() for p in args.inputs.split(",") if p.strip()),
                output=args.out,
                cuts_deg=tuple(float(c) for c in args.cut.split(",") if c.strip()),
                floor_db=args.floor,
            )
            render_pattern(spec)
        else:
            render_sweep(args.inputs, args.x, args.y, args.out, log_x=args.log_x)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
