"""Command line entry point: qsspplots render --kind K --in csv... --out img."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, render
from .schemas import RenderError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsspplots",
        description="Render figures from simulator result CSVs.")
    sub = parser.add_subparsers(dest="command", required=True)

    cmd = sub.add_parser("render", help="render one figure from CSV inputs")
    cmd.add_argument("--kind", required=True, choices=FIGURE_KINDS,
                     help="figure kind")
    cmd.add_argument("--in", dest="inputs", nargs="+", required=True,
                     metavar="CSV", help="input CSV paths")
    cmd.add_argument("--out", required=True, metavar="IMAGE",
                     help="output image path (extension picks the format)")
    return parser


def entry_point(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(inputs=tuple(args.inputs), kind=args.kind,
                      output=args.out)
    try:
        written = render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(written)
    return 0


if __name__ == "__main__":
    sys.exit(entry_point())
