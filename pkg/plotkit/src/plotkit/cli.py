"""Command-line entry point: ``plotkit --kind ... --out ... csv [csv ...]``."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, PlotKitError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from banditlab aggregate CSVs.",
    )
    parser.add_argument("inputs", nargs="+", help="aggregate CSV paths")
    parser.add_argument("--kind", choices=FIGURE_KINDS, required=True)
    parser.add_argument("--group", default="params_json")
    parser.add_argument("--out", required=True, help="output image path")
    return parser


def dispatch(argv: list[str]) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        inputs=tuple(args.inputs),
        kind=args.kind,
        group=args.group,
        out=args.out,
    )
    try:
        path = render(spec)
    except (PlotKitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
