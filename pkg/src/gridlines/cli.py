"""Command-line front end.

Subcommands: moments, verify, sweep, support.  Exit codes: 0 success,
1 check failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from .errors import GridlinesError
from .harness import (
    ExperimentConfig,
    run_moments,
    run_support,
    run_sweep,
    run_verify,
    support_to_csv,
    support_to_json_dict,
    sweep_to_csv,
    sweep_to_json_dict,
    write_text,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _add_common(sp: argparse.ArgumentParser, multi_prime: bool = False) -> None:
    if multi_prime:
        sp.add_argument("--primes", required=True,
                        help="comma-separated list of odd primes")
    else:
        sp.add_argument("--prime", "-p", type=int, required=True,
                        help="odd prime modulus")
    sp.add_argument("--set", required=True, dest="set_descriptor",
                    help="set descriptor, e.g. list:0,1 or bernoulli:0.3:42")
    sp.add_argument("--strategy", choices=["naive", "slope_direct", "slope_fast"],
                    default=None, help="histogram strategy (default: auto)")
    sp.add_argument("--seed", type=int, default=0,
                    help="base seed for random families (default 0)")
    sp.add_argument("--threads", type=int, default=1,
                    help="parallel workers for sweeps (default 1)")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--format", choices=["json", "csv"], default="json",
                    dest="fmt", help="output format")
    sp.add_argument("--timings", action="store_true",
                    help="include wall-clock timings (breaks byte-reproducibility)")
    sp.add_argument("--verbose", action="store_true", help="log strategy choices")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridlines",
        description="Exact incidence statistics of A x A over a prime field",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("moments", help="histogram, moments, and bound report")
    _add_common(sp)

    sp = sub.add_parser("verify", help="all exact checks plus oracle cross-checks")
    _add_common(sp)
    sp.add_argument("--t-cap", type=int, default=8, help="max n for triple oracle")
    sp.add_argument("--q-cap", type=int, default=6, help="max n for quadruple oracle")
    sp.add_argument("--alg-cap", type=int, default=20,
                    help="max n for the ratio-equation count")
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    sp = sub.add_parser("sweep", help="multi-prime Monte Carlo sweep")
    _add_common(sp, multi_prime=True)
    sp.add_argument("--trials", type=int, default=1, help="trials per prime")

    sp = sub.add_parser("support", help="product-representation support census")
    _add_common(sp)
    sp.add_argument("--sample", type=int, default=None,
                    help="census only this many sampled base pairs")
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    if hasattr(args, "primes"):
        try:
            primes = tuple(int(tok) for tok in args.primes.split(","))
        except ValueError:
            raise GridlinesError(f"bad --primes list {args.primes!r}") from None
    else:
        primes = (args.prime,)
    return ExperimentConfig(
        primes=primes,
        set_descriptor=args.set_descriptor,
        strategy=args.strategy,
        trials=getattr(args, "trials", 1),
        seed=args.seed,
        threads=args.threads,
        t_cap=getattr(args, "t_cap", 8),
        q_cap=getattr(args, "q_cap", 6),
        alg_cap=getattr(args, "alg_cap", 20),
        timings=args.timings,
        inject_fault=getattr(args, "inject_fault", False),
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config(args)
        if args.command in ("moments", "verify"):
            run = run_moments if args.command == "moments" else run_verify
            report = run(cfg)
            if args.fmt == "json":
                write_text(args.out, json.dumps(report.to_json_dict(), indent=2) + "\n")
            else:
                # CSV form: one sweep-style row for machine consumption.
                from .harness import SweepRow, SweepResult, _aggregate, sweep_to_csv as _to_csv

                row = SweepRow(
                    prime=report.p, trial=0, seed=report.seed or 0, n=report.n,
                    s1=report.moment_set.s1, s2=report.moment_set.s2,
                    t=report.moment_set.s3, q=report.moment_set.s4,
                    expected_t=report.expected_t, expected_q=report.expected_q,
                    t_ratio=report.ratios.t_ratio, q_ratio=report.ratios.q_ratio,
                    proposition_pass=report.proposition.passed,
                    class_bound_pass=report.class_bound.passed,
                    wall_time_ms=(report.timings_ms or {}).get("histogram", 0.0),
                )
                result = SweepResult(cfg, [row], _aggregate([row]))
                write_text(args.out, _to_csv(result))
            return EXIT_OK if report.overall_pass else EXIT_CHECK_FAILED
        if args.command == "sweep":
            result = run_sweep(cfg)
            if args.fmt == "csv":
                write_text(args.out, sweep_to_csv(result))
            else:
                write_text(args.out, json.dumps(sweep_to_json_dict(result), indent=2) + "\n")
            return EXIT_OK if result.all_passed else EXIT_CHECK_FAILED
        if args.command == "support":
            summary = run_support(cfg, sample=args.sample)
            if args.fmt == "csv":
                write_text(args.out, support_to_csv(summary))
            else:
                write_text(args.out, json.dumps(support_to_json_dict(summary), indent=2) + "\n")
            return EXIT_OK
    except GridlinesError as exc:
        print(f"gridlines: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
