"""Command line front end: run experiment configs and named presets."""

import argparse
import json
import sys

from .experiments import PRESET_NAMES, ConfigError, preset, run_config
from .linalg import SolverError
from .mesh import MeshError


def _print_reports(reports):
    for r in reports:
        print(
            f"{r.run_id}: dofs={r.dofs} err_l2={r.err_l2:.6g} err_h1={r.err_h1:.6g} "
            f"err_dg={r.err_dg:.6g} max_sigma_interior={r.max_sigma_interior:.6g} "
            f"max_sigma_global={r.max_sigma_global:.6g} cond2={r.cond2:.6g}"
        )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a JSON experiment config")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--out", default=".", help="output directory for CSV files")
    run_p.add_argument("--threads", type=int, default=1)

    pre_p = sub.add_parser("preset", help="run a named experiment preset")
    pre_p.add_argument("name", choices=PRESET_NAMES)
    pre_p.add_argument("--p", type=int, default=None, help="override the polynomial degree")
    pre_p.add_argument("--eps", type=float, default=None, help="override the layer parameter")
    pre_p.add_argument("--method", choices=["ipdg", "ripdg", "both"], default=None)
    pre_p.add_argument("--out", default=".", help="output directory for CSV files")
    pre_p.add_argument("--threads", type=int, default=1)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            with open(args.config) as fh:
                cfg = json.load(fh)
        else:
            cfg = preset(args.name, p=args.p, eps=args.eps, method=args.method)
        if args.threads != 1:
            cfg.setdefault("method", {})["workers"] = args.threads
        reports, csv_path = run_config(cfg, out_dir=args.out)
    except (ConfigError, MeshError, SolverError, FileNotFoundError, ValueError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_reports(reports)
    if csv_path:
        print(f"wrote {csv_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
