"""Command-line experiment runner.

Verbs:
    run          execute a verification suite and write its artifacts
    validate     check a configuration file, reporting every problem found
    list-suites  print the available suite names

The exit status of ``run`` is nonzero exactly when some check failed (or
was skipped because its computation did not complete).
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ExperimentConfig, load_config, validate_config
from .reporting import Reporter
from .suites import run_suite, suite_names

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multibump",
        description="Desk-scale verification runner for multi-bump "
                    "configurations of the critical fractional equation.")
    sub = parser.add_subparsers(dest="verb", required=True)

    run_p = sub.add_parser("run", help="execute a suite and write artifacts")
    run_p.add_argument("--config", metavar="PATH",
                       help="JSON configuration file (defaults if omitted)")
    run_p.add_argument("--suite", metavar="NAME", choices=suite_names(),
                       help="suite to run (overrides the config)")
    run_p.add_argument("--out", metavar="DIR",
                       help="output directory (overrides the config)")
    run_p.add_argument("--seed", metavar="INT", type=int,
                       help="random seed (overrides the config)")
    run_p.add_argument("--threads", metavar="INT", type=int,
                       help="worker threads for suite 'all'")

    val_p = sub.add_parser("validate", help="validate a configuration file")
    val_p.add_argument("--config", metavar="PATH", required=True,
                       help="JSON configuration file to validate")

    sub.add_parser("list-suites", help="print available suite names")
    return parser


def _cmd_run(args) -> int:
    if args.config:
        try:
            cfg = load_config(args.config)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        cfg = ExperimentConfig()
    overrides = {}
    if args.suite is not None:
        overrides["suite"] = args.suite
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if overrides:
        cfg = cfg.replace(**overrides)

    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
        probe = os.path.join(cfg.out_dir, ".write-probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return 2

    rep = Reporter()
    run_suite(cfg.suite, cfg, rep)
    rep.write(cfg.out_dir, cfg)
    for line in rep.summary_lines():
        print(line)
    bad = rep.n_failed + rep.n_skipped
    print(f"{len(rep.rows)} checks: {len(rep.rows) - bad} passed, "
          f"{rep.n_failed} failed, {rep.n_skipped} skipped "
          f"-> {cfg.out_dir}/summary.csv")
    return 1 if bad else 0


def _cmd_validate(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg, errors = validate_config(text)
    if cfg is None:
        for e in errors:
            print(f"{args.config}: {e['field']}: {e['message']}")
        print(f"{len(errors)} error(s)")
        return 1
    print(f"{args.config}: valid (suite={cfg.suite}, seed={cfg.seed})")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "run":
        return _cmd_run(args)
    if args.verb == "validate":
        return _cmd_validate(args)
    if args.verb == "list-suites":
        for name in suite_names():
            print(name)
        return 0
    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
