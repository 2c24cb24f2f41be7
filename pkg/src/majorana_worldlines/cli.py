"""Command-line front end: ``run``, ``preset``, ``list-presets`` and ``validate``."""

from __future__ import annotations

import argparse
import logging
import sys

from .frames import CausalityError as FrameCausalityError
from .influence import CausalityError as InfluenceCausalityError
from .presets import get_preset, list_presets
from .scenario import ScenarioError, load_scenario, run_scenario, write_outputs
from .worldline import DomainError

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_CAUSALITY = 3
EXIT_NONCONVERGED = 4

log = logging.getLogger("majorana_worldlines")


def _execute(scenario, args) -> int:
    try:
        result = run_scenario(scenario, tolerance=args.tol, jobs=args.jobs)
    except (FrameCausalityError, InfluenceCausalityError, DomainError) as exc:
        log.error("causality error: %s", exc)
        return EXIT_CAUSALITY
    paths = write_outputs(result, args.out)
    for p in paths:
        print(p)
    if not result.converged:
        log.warning("frequency quadrature did not reach the requested tolerance; see the summary flags")
        if args.strict:
            return EXIT_NONCONVERGED
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        log.error("%s", exc)
        return EXIT_SCHEMA
    except OSError as exc:
        log.error("cannot read scenario: %s", exc)
        return EXIT_SCHEMA
    return _execute(scenario, args)


def _cmd_preset(args) -> int:
    try:
        scenario = get_preset(args.name)
    except KeyError as exc:
        log.error("%s", exc.args[0])
        return EXIT_SCHEMA
    if args.dump:
        sys.stdout.write(scenario.to_yaml())
        return EXIT_OK
    return _execute(scenario, args)


def _cmd_list(args) -> int:
    for name, desc in list_presets():
        print(f"{name:<12} {desc}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        log.error("%s", exc)
        return EXIT_SCHEMA
    except OSError as exc:
        log.error("cannot read scenario: %s", exc)
        return EXIT_SCHEMA
    print(f"{args.scenario}: valid scenario {scenario.name!r}")
    return EXIT_OK


def _run_options(p):
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for curves and scan points")
    p.add_argument("--tol", type=float, default=None, help="relative tolerance of the frequency quadrature")
    p.add_argument("--strict", action="store_true", help="exit with status 4 on non-convergence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majorana-worldlines",
                                     description="Decoherence of moving topological qubits.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("scenario")
    _run_options(p)
    p.set_defaults(func=_cmd_run)
    p = sub.add_parser("preset", help="run a built-in figure scenario")
    p.add_argument("name")
    p.add_argument("--dump", action="store_true", help="print the preset as a scenario file instead")
    _run_options(p)
    p.set_defaults(func=_cmd_preset)
    p = sub.add_parser("list-presets", help="list the built-in scenarios")
    p.set_defaults(func=_cmd_list)
    p = sub.add_parser("validate", help="check a scenario file against the schema")
    p.add_argument("scenario")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        log.error("--jobs must be at least 1")
        return EXIT_SCHEMA
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
