"""Batch figure renderer for bhchaos output directories."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, PlotviewError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotview", description="Render figures from bhchaos CSV outputs")
    parser.add_argument("--input", type=Path, required=True,
                        help="directory containing the sweep CSVs")
    parser.add_argument("--figure", choices=FIGURE_KINDS, required=True)
    parser.add_argument("--out", type=Path, required=True,
                        help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render(args.input, args.figure, args.out)
    except PlotviewError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
