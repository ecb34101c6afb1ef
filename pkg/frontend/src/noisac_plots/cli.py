"""Command-line wrapper: noisac-plots render --spec f6 --in sweep.csv --out f6.png"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURE_IDS, EmptyInputError, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisac-plots",
        description="Render figures from noisac CSV results",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure")
    p.add_argument("--spec", required=True, choices=FIGURE_IDS, help="figure id")
    p.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="input CSV files (one series group per file)")
    p.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(figure_id=args.spec,
                      inputs=tuple(Path(p) for p in args.inputs),
                      output=Path(args.out))
    try:
        out = render(spec)
    except (SchemaError, EmptyInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
