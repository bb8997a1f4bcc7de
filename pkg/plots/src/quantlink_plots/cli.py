"""quantlink-plot: render experiment CSVs to figure files."""
from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, PlotSpec, SchemaError, render

SCHEMA_ERROR = 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="quantlink-plot",
        description="Render MSE/BER/SE figures from quantlink experiment CSVs.",
    )
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument(
        "--csv", required=True, action="append", help="input CSV (repeat for several files)"
    )
    parser.add_argument("--out", required=True, help="output image path (.svg/.png/.pdf)")
    args = parser.parse_args(argv)

    try:
        render(PlotSpec(input_csv=tuple(args.csv), kind=args.kind, out_path=args.out))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return SCHEMA_ERROR
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
