"""CLI: dprisac-plots render --experiment <name> --csv <path> --out <path>."""

import argparse
import sys

from .render import FigureSpec, render
from .schemas import EXPERIMENTS, SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dprisac-plots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one experiment CSV to an image")
    p.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    p.add_argument("--csv", required=True, help="input CSV written by dprisac")
    p.add_argument("--out", required=True, help="output image path (.png, .svg, ...)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        path = render(FigureSpec(args.experiment, args.csv, args.out))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
