"""Command-line front end: solve one scenario, run an experiment sweep, or run
the built-in oracle checks. Exit codes: 0 ok, 1 solver failure, 2 usage/config."""

import argparse
import json
import os
import sys

from .driver import EXPERIMENTS, run_experiment, solve_realization
from .precopt import SensingInfeasibleError
from .scenario import ConfigError, Scenario, load_config
from .validate import validate_suite

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dprisac")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="scenario config file (key = value lines)")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--out", help="output directory (default $DPRISAC_OUT or ./out)")
        p.add_argument("--quiet", action="store_true")

    p_solve = sub.add_parser("solve", help="solve one realization, write SolveReport JSON")
    common(p_solve)

    p_exp = sub.add_parser("experiment", help="run a named sweep, write CSV")
    p_exp.add_argument("name", choices=EXPERIMENTS)
    p_exp.add_argument("--seeds", type=int, help="realizations per sweep point")
    p_exp.add_argument("--jobs", type=int, default=1, help="parallel workers")
    common(p_exp)

    p_val = sub.add_parser("validate", help="run the oracle/property checks")
    p_val.add_argument("--quiet", action="store_true")
    return parser


def _load_scenario(args) -> Scenario:
    sc = load_config(args.config) if args.config else Scenario()
    if getattr(args, "seed", None) is not None:
        sc = sc.with_overrides(seed=args.seed)
    return sc


def _out_dir(args) -> str:
    return args.out or os.environ.get("DPRISAC_OUT", "out")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    try:
        if args.command == "validate":
            failures = 0
            for name, ok, detail in validate_suite():
                if not args.quiet:
                    print(f"{'PASS' if ok else 'FAIL'} {name} ({detail})")
                failures += 0 if ok else 1
            return EXIT_SOLVER if failures else EXIT_OK

        sc = _load_scenario(args)
        out_dir = _out_dir(args)

        if args.command == "solve":
            report = solve_realization(sc, 0, "dp")
            os.makedirs(out_dir, exist_ok=True)
            path = os.path.join(out_dir, "solve_report.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
            if not args.quiet:
                print(f"wrote {path} (rate {report.final_rate:.4f} nats, "
                      f"feasible={report.feasible})")
            return EXIT_OK if report.feasible else EXIT_SOLVER

        if args.command == "experiment":
            if sc.seed is not None and args.seeds is not None and args.seeds < 1:
                print("--seeds must be >= 1", file=sys.stderr)
                return EXIT_USAGE
            paths = run_experiment(args.name, out_dir, scenario=sc,
                                   n_seeds=args.seeds, n_jobs=args.jobs)
            if not args.quiet:
                for label, path in paths.items():
                    print(f"wrote {path}")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SensingInfeasibleError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
