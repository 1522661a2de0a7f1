"""Command line entry point: ``secrecy-sim sweep|validate|preset``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .essr import AVERAGE_THEN_CLAMP, CLAMP_THEN_AVERAGE, DEFAULT_TRIALS, Method
from .model import ConfigError, NetworkConfig, load_config
from .opa import Strategy
from .sweep import SweepSpec, _enum, parse_range, run_preset, run_sweep
from .validation import validate

log = logging.getLogger("secrecysim")

EXIT_OK, EXIT_FAILED, EXIT_BAD_INPUT = 0, 1, 2


def _list(cls, text: str) -> tuple:
    items = [t.strip() for t in text.split(",") if t.strip()]
    return tuple(_enum(cls, t) for t in items)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="Monte Carlo trials per point")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: SECRECY_SIM_THREADS or CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secrecy-sim",
                                     description="Secrecy sum rate of two-way relaying with a friendly jammer")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run one parameter sweep")
    _common(sw)
    sw.add_argument("--config", help="key = value network config file")
    sw.add_argument("--sweep", required=True, help="kind:start:stop:step, kind in SnrDb, NumFjAntennas, FjDistance")
    sw.add_argument("--strategies", default="OpaNumeric",
                    help="comma list of OpaClosed, OpaLsma, OpaNumeric, Epa, WoFjOpa")
    sw.add_argument("--methods", default="MonteCarlo", help="comma list of MonteCarlo, ClosedForm, Asymptotic")
    sw.add_argument("--lsma-sinr", action="store_true", help="use large-array SINRs in Monte Carlo")
    sw.add_argument("--convention", choices=(AVERAGE_THEN_CLAMP, CLAMP_THEN_AVERAGE), default=AVERAGE_THEN_CLAMP)

    va = sub.add_parser("validate", help="run the oracle-equivalence suite")
    va.add_argument("--out", default="validation.json", help="JSON report path")

    pr = sub.add_parser("preset", help="reproduce a figure dataset")
    pr.add_argument("name", choices=("fig2", "fig3", "fig4"))
    _common(pr)
    return parser


def _run(args) -> int:
    if args.command == "validate":
        report = validate(args.out)
        for c in report["checks"]:
            print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}")
        print(f"report written to {args.out}")
        return EXIT_OK if report["passed"] else EXIT_FAILED

    if args.command == "preset":
        summary = run_preset(args.name, args.out, args.trials, args.seed, args.threads)
    else:
        cfg = load_config(args.config) if args.config else NetworkConfig()
        kind, values = parse_range(args.sweep)
        spec = SweepSpec(kind, values, _list(Strategy, args.strategies), _list(Method, args.methods),
                         args.trials, args.seed, args.lsma_sinr, args.convention)
        summary = run_sweep(spec, cfg, args.out, args.threads)
    print(json.dumps(summary))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_BAD_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConfigError, ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
