"""CLI: fadecap-figs render --preset figN --csv PATH --out PATH.svg"""

from __future__ import annotations

import argparse
import sys

from .renderer import FigureJob, SchemaError, render

PRESETS = ("fig1", "fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig6")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fadecap-figs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one CSV artifact to an image")
    p.add_argument("--preset", required=True, choices=PRESETS)
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", default=None, choices=["svg", "png"],
                   help="default: inferred from --out extension")

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0

    fmt = args.format or ("png" if args.out.lower().endswith(".png") else "svg")
    try:
        out = render(FigureJob(args.csv, args.preset, args.out, fmt))
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
