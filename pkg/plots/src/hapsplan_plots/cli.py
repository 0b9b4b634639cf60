"""CLI: hapsplan-render --csv PATH --kind fig2..fig5 --out PATH.png"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .render import KINDS, FigureSpec, SchemaError, render


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="hapsplan-render", description=__doc__)
    parser.add_argument("--csv", type=Path, required=True, help="sweep CSV input")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--out", type=Path, required=True, help="output PNG path")
    args = parser.parse_args(argv)
    try:
        path = render(FigureSpec(input_csv=args.csv, kind=args.kind, output_path=args.out))
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
