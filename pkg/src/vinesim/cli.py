"""Command-line entry point.

    vinesim run --scenario fig5_course --pilot auto --seed 3 --t-max 1800 \
                --log out/ [--record cmds.jsonl] [--replay cmds.jsonl]
    vinesim bench

Exit codes of `run`: 0 victim found, 2 tube exhausted, 3 timeout, 1 error.
VINESIM_LOG_LEVEL sets the logging level (default WARNING).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .runner import EXIT_ERROR, load_command_log, replay, run
from .scenarios import load_bundled, scenario_from_path

log = logging.getLogger("vinesim")


def _setup_logging():
    level = os.environ.get("VINESIM_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _resolve_scenario(spec: str):
    p = Path(spec)
    if p.exists():
        return scenario_from_path(p)
    return load_bundled(spec)


def main(argv=None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(prog="vinesim")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="run a scenario headlessly or with the gateway")
    p_run.add_argument("--scenario", required=True, help="bundled name or path to a scenario JSON")
    p_run.add_argument("--pilot", choices=["auto", "replay", "gateway"], default="auto")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--t-max", type=float, default=1800.0)
    p_run.add_argument("--log", help="directory for telemetry.jsonl")
    p_run.add_argument("--record", help="file to record the pilot command log to")
    p_run.add_argument("--replay", help="command log to replay (with --pilot replay)")
    p_run.add_argument("--port", type=int, default=8765, help="gateway port (pilot=gateway)")

    sub.add_parser("bench", help="benchmark the geometry kernel backends")

    p_ls = sub.add_parser("scenarios", help="list bundled scenarios")

    args = parser.parse_args(argv)

    if args.cmd == "bench":
        from .benchmarks import run_benchmark

        run_benchmark()
        return 0

    if args.cmd == "scenarios":
        from .scenarios import bundled_names

        for name in bundled_names():
            print(name)
        return 0

    try:
        scenario = _resolve_scenario(args.scenario)
    except Exception as exc:
        log.error("scenario load failed: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    log_path = None
    if args.log:
        log_dir = Path(args.log)
        log_dir.mkdir(parents=True, exist_ok=True)
        log_path = log_dir / "telemetry.jsonl"

    try:
        if args.pilot == "replay":
            if not args.replay:
                print("error: --pilot replay requires --replay FILE", file=sys.stderr)
                return EXIT_ERROR
            entries = load_command_log(args.replay)
            result = replay(
                entries, scenario, seed=args.seed, t_max=args.t_max, log_path=log_path
            )
        elif args.pilot == "gateway":
            from .gateway import serve_run

            result = serve_run(
                scenario,
                seed=args.seed,
                t_max=args.t_max,
                log_path=log_path,
                record_path=args.record,
                port=args.port,
            )
        else:
            result = run(
                scenario,
                seed=args.seed,
                t_max=args.t_max,
                log_path=log_path,
                record_path=args.record,
            )
    except Exception as exc:
        log.exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    m = result.metrics
    print(
        f"{scenario.name}: {result.outcome} after {m['elapsed_s']:.1f} s, "
        f"path {m['path_length_m']:.2f} m, tube {m['tube_used_m']:.2f} m, "
        f"{m['blocked_events']} contacts"
    )
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
