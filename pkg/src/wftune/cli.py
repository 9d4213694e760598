"""Command line entry points: experiment runs and the live session service."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .core import ConfigurationError
from .harness import SCENARIO_NAMES, Scenario, run_scenario, write_csv

log = logging.getLogger("wftune")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wftune",
        description="Online semi-automatic index tuning: scenario harness and session service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser(
        "run", help="run one experiment scenario and write per-statement metrics"
    )
    run_parser.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    run_parser.add_argument(
        "--lag",
        type=int,
        default=1,
        help="statements between recommendation acceptances (lagged scenario only)",
    )
    run_parser.add_argument("--phases", type=int, default=8)
    run_parser.add_argument("--per-phase", type=int, default=50)
    run_parser.add_argument("--seed", type=int, default=0)
    run_parser.add_argument("--idx-cnt", type=int, default=40)
    run_parser.add_argument("--state-cnt", type=int, default=128)
    run_parser.add_argument("--hist-size", type=int, default=100)
    run_parser.add_argument("--partition", choices=("fixed", "auto"), default="fixed")
    run_parser.add_argument(
        "--workload-file", default=None, help="JSON catalog + workload spec to replay"
    )
    run_parser.add_argument("--out", default="results.csv")

    serve_parser = sub.add_parser(
        "serve", help="start the HTTP session service for the DBA console"
    )
    serve_parser.add_argument("--host", default="127.0.0.1")
    serve_parser.add_argument("--port", type=int, default=8787)
    serve_parser.add_argument(
        "--snapshot", default=None, help="dump session event logs to this file on shutdown"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("WFTUNE_LOG", "WARNING").upper()
    logging.basicConfig(level=level if hasattr(logging, level) else logging.WARNING)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            scenario = Scenario(
                name=args.scenario,
                lag=args.lag,
                phases=args.phases,
                per_phase=args.per_phase,
                seed=args.seed,
                idx_cnt=args.idx_cnt,
                state_cnt=args.state_cnt,
                hist_size=args.hist_size,
                partition=args.partition,
                workload_file=args.workload_file,
            )
            rows = run_scenario(scenario)
            write_csv(rows, args.out)
            final = rows[-1] if rows else None
            if final:
                log.info(
                    "%s: %d statements, final ratio %.4f, %d oracle calls",
                    final.algo,
                    final.n,
                    final.ratio,
                    final.oracle_calls,
                )
            return 0
        if args.command == "serve":
            import uvicorn

            from .service import create_app

            uvicorn.run(
                create_app(snapshot_path=args.snapshot),
                host=args.host,
                port=args.port,
                log_level="warning",
            )
            return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
