"""Command line entry point.

    chiral-phonons run [CONFIG] [--scenario fig2|fig4] [--seed N] [--out DIR]
                       [--realizations N] [--convention raw|subtracted]
                       [--phase-match eq13|lorentzian] [--workers N]
    chiral-phonons validate CONFIG
"""
from __future__ import annotations

import argparse
import logging
import sys

from .experiments.config import ConfigError, build_config, load_config
from .experiments.report import emit_report
from .experiments.scenarios import run_fig2, run_fig4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chiral-phonons", description="Chiral phonon transport scenarios")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and write CSV/SVG/JSON output")
    run.add_argument("config", nargs="?", help="JSON scenario file")
    run.add_argument("--scenario", choices=["fig2", "fig4"])
    run.add_argument("--seed", type=int)
    run.add_argument("--out", dest="output_dir")
    run.add_argument("--realizations", dest="n_realizations", type=int)
    run.add_argument("--convention", choices=["raw", "subtracted"])
    run.add_argument("--phase-match", dest="phase_match", choices=["eq13", "lorentzian"])
    run.add_argument("--workers", type=int)
    run.add_argument("-v", "--verbose", action="store_true")
    val = sub.add_parser("validate", help="check a scenario file against the schema")
    val.add_argument("config")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            cfg = load_config(args.config)
            print(f"{args.config}: valid {cfg.scenario} scenario")
            return 0
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        overrides = {k: getattr(args, k) for k in ("scenario", "seed", "output_dir", "n_realizations", "convention", "phase_match", "workers")}
        if args.config:
            cfg = load_config(args.config, overrides)
        elif args.scenario:
            cfg = build_config({}, overrides)
        else:
            print("run: give a config file or --scenario", file=sys.stderr)
            return 2
        result = run_fig2(cfg) if cfg.scenario == "fig2" else run_fig4(cfg)
        files = emit_report(result, cfg.output_dir)
        for f in files:
            print(f)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
