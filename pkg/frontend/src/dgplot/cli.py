"""dgplot: render benchmark CSV files into static figures."""

import argparse
import sys

from .csvdata import CsvError
from .plots import plot_convergence, plot_penalty_condition


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dgplot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convergence", help="error vs sqrt(DoF), log scale")
    conv.add_argument("csv")
    conv.add_argument("-o", "--out", required=True)
    conv.add_argument("--style", default=None, help="JSON file of matplotlib rcParams")

    pen = sub.add_parser("penalty", help="max penalty and condition number vs degree")
    pen.add_argument("csv")
    pen.add_argument("-o", "--out", required=True)
    pen.add_argument("--style", default=None)
    pen.add_argument("--penalty-column", default="max_sigma_interior")
    pen.add_argument("--cond-column", default="cond2")

    args = parser.parse_args(argv)
    try:
        if args.command == "convergence":
            plot_convergence(args.csv, args.out, style_path=args.style)
        else:
            plot_penalty_condition(
                args.csv,
                args.out,
                style_path=args.style,
                penalty_column=args.penalty_column,
                cond_column=args.cond_column,
            )
    except (CsvError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
