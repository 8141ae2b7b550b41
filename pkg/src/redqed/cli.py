"""Command-line entry point: ``redqed run <scenario> [--config FILE] [--out DIR] [--threads N] [--seed S]``.

Exit status: 0 when every check passes, 2 for configuration errors, 3 when a
check fails or the physics inputs are rejected.
"""
from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import yaml

from . import __version__
from .config import SCENARIO_NAMES, build_config, load_yaml
from .errors import ConfigurationError
from .io import write_csv, write_json
from .kspace import get_default_threads, set_default_threads
from .scenarios import DEFAULT_TOLERANCES, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3

log = logging.getLogger("redqed")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="redqed", description="Run verification scenarios.")
    parser.add_argument("--version", action="version", version=f"redqed {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("scenario", choices=SCENARIO_NAMES)
    run.add_argument("--config", type=Path, help="YAML configuration file")
    run.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    run.add_argument("--threads", type=int, default=1, help="worker threads (default: 1)")
    run.add_argument("--seed", type=int, help="override the configured seed")
    run.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("list", help="list scenarios and their checks")

    show = sub.add_parser("show-config", help="print the default configuration of a scenario")
    show.add_argument("scenario", choices=SCENARIO_NAMES)
    return parser


def _manifest(cfg, started, threads, checks=None, artifacts=None, error=None) -> dict:
    checks = checks or []
    return {
        "toolkit": "redqed",
        "version": __version__,
        "scenario": cfg.scenario,
        "config_hash": cfg.digest(),
        "config": cfg.resolved(),
        "seed": cfg.seed,
        "threads": threads,
        "started": started,
        "finished": _now(),
        "passed": error is None and all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
        "artifacts": artifacts or {},
        "error": error,
    }


def cmd_run(args) -> int:
    started = _now()
    try:
        if args.threads < 1:
            raise ConfigurationError("--threads: must be >= 1")
        data = load_yaml(args.config) if args.config else {}
        cfg = build_config(data, args.scenario, args.seed, DEFAULT_TOLERANCES[args.scenario])
    except ConfigurationError as exc:
        print(f"redqed: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    previous = get_default_threads()
    set_default_threads(args.threads)
    try:
        log.info("running %s (seed %d, %d threads)", cfg.scenario, cfg.seed, args.threads)
        result = run_scenario(cfg, out)
    except ConfigurationError as exc:
        print(f"redqed: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # structured failure: physics inputs rejected by a module
        write_json(out / "manifest.json", _manifest(cfg, started, args.threads,
                                                    error={"type": type(exc).__name__, "message": str(exc)}))
        print(f"redqed: {cfg.scenario} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK
    finally:
        set_default_threads(previous)

    write_csv(out / "results.csv", result.rows)
    write_json(out / "manifest.json", _manifest(cfg, started, args.threads, result.checks, result.artifacts))
    for c in result.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value:.3e} ({c.relation} {c.threshold:g})")
    return EXIT_OK if result.passed else EXIT_CHECK


def cmd_list() -> int:
    for name in SCENARIO_NAMES:
        print(f"{name}: {', '.join(DEFAULT_TOLERANCES[name])}")
    return EXIT_OK


def cmd_show_config(args) -> int:
    print(yaml.safe_dump(build_config({}, args.scenario).resolved(), sort_keys=False), end="")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        return cmd_run(args)
    if args.command == "list":
        return cmd_list()
    return cmd_show_config(args)


if __name__ == "__main__":
    sys.exit(main())
