"""Command-line renderer: render --kind K --in a.csv [--in b.csv] --out fig.png."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, render
from .tables import TableError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="Render ecomech CSV tables into charts."
    )
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="CSV", help="input table; repeat for several")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    labels = {"title": args.title} if args.title else {}
    spec = FigureSpec(
        kind=args.kind,
        input_paths=tuple(args.inputs),
        output_path=args.out,
        labels=labels,
    )
    try:
        out = render(spec)
    except TableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
