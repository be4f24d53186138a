"""Command-line entry point.

Exit codes: 0 success, 1 scenario validation failure, 2 a proposition check
failed (``verify`` only), 64 usage error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import scenario_io
from .model import MODES, PLAYERS, ScenarioError, StrategyProfile, scenario_notes, win_probabilities
from .model import eval_cn_incomplete, eval_cn_perfect, eval_us_incomplete, eval_us_perfect
from .solver import AXES, best_response, sweep, verify_propositions

EXIT_OK, EXIT_INVALID, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2, 64

log = logging.getLogger("conflictgains")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _add_common(p: argparse.ArgumentParser, formats=("json", "csv"), default_format="json"):
    p.add_argument("--scenario", required=True, metavar="PATH", help="scenario JSON file")
    p.add_argument("--out", metavar="PATH", help="output file (default: standard output)")
    p.add_argument("--format", choices=formats, default=default_format, help=f"output format (default {default_format})")
    p.add_argument("--seed", type=int, metavar="U64", help="override the scenario's seed")


def _add_player(p, with_opponent=True):
    p.add_argument("--player", choices=PLAYERS, default="us", help="player whose gain is evaluated (default us)")
    p.add_argument("--mode", choices=MODES, default="perfect", help="information mode (default perfect)")
    if with_opponent:
        p.add_argument("--fixed-opponent", type=float, metavar="REAL",
                       help="opponent's winning utility, held fixed (default c_low)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conflictgains", description="Expected-net-gain engine for a two-player asymmetric conflict.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="load and validate a scenario")
    _add_common(p, formats=("json",))

    p = sub.add_parser("eval", help="evaluate a player's expected net gain at one profile")
    _add_common(p, formats=("json",))
    _add_player(p)
    p.add_argument("--own", type=float, metavar="REAL", help="player's own winning utility (default c_low)")

    p = sub.add_parser("best-response", help="best response of a player to a fixed opponent utility")
    _add_common(p, formats=("json",))
    _add_player(p)

    p = sub.add_parser("verify", help="check the four propositions; exit 2 if any fails")
    _add_common(p)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, metavar="N",
                   help="concurrent proposition checks (default: available cores)")

    p = sub.add_parser("sweep", help="plot-ready series of a player's gain along one axis")
    _add_common(p, default_format="csv")
    _add_player(p)
    p.add_argument("--axis", choices=AXES, default="own-utility", help="swept quantity (default own-utility)")
    p.add_argument("--grid", type=int, default=50, metavar="N", help="number of points, >= 2 (default 50)")
    return parser


def _load(args):
    scenario = scenario_io.load_scenario_file(args.scenario)
    if args.seed is not None:
        if args.seed < 0:
            raise UsageError("--seed must be non-negative")
        scenario = scenario.with_settings(seed=args.seed)
    return scenario


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_validate(args, scenario):
    alpha, beta = win_probabilities(scenario.capabilities)
    doc = {"valid": True, "alpha": scenario_io.sig(alpha), "beta": scenario_io.sig(beta),
           "notes": scenario_notes(scenario), "scenario": scenario_io.scenario_to_doc(scenario)}
    _write(args, scenario_io.emit_document(doc))
    return EXIT_OK


def _cmd_eval(args, scenario):
    low = scenario.bounds.c_low
    own = low if args.own is None else args.own
    opp = low if args.fixed_opponent is None else args.fixed_opponent
    profile = StrategyProfile(own, opp) if args.player == "us" else StrategyProfile(opp, own)
    fn = {("us", "perfect"): eval_us_perfect, ("us", "incomplete"): eval_us_incomplete,
          ("cn", "perfect"): eval_cn_perfect, ("cn", "incomplete"): eval_cn_incomplete}[(args.player, args.mode)]
    value = fn(profile, scenario)
    doc = {"player": args.player, "mode": args.mode,
           "profile": {"u_win_us": profile.u_win_us, "u_win_cn": profile.u_win_cn},
           "value": scenario_io.sig(value)}
    _write(args, scenario_io.emit_document(doc))
    return EXIT_OK


def _cmd_best_response(args, scenario):
    br = best_response(args.player, args.mode, scenario, args.fixed_opponent)
    opp = scenario.bounds.c_low if args.fixed_opponent is None else args.fixed_opponent
    doc = {"player": args.player, "mode": args.mode, "fixed_opponent": opp, "exists": br.exists,
           "arg": scenario_io.sig(br.arg), "value": scenario_io.sig(br.value)}
    _write(args, scenario_io.emit_document(doc))
    return EXIT_OK


def _cmd_verify(args, scenario):
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        reports = verify_propositions(scenario, executor=pool)
    _write(args, scenario_io.emit_report(reports, args.format))
    failed = [r.proposition for r in reports if not r.passed]
    for r in reports:
        log.info("%s %s", r.proposition, "pass" if r.passed else "FAIL")
    if failed:
        print(f"proposition checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_sweep(args, scenario):
    series = sweep(args.player, args.mode, scenario, args.axis, args.grid, args.fixed_opponent)
    _write(args, scenario_io.emit_series(series, args.format))
    return EXIT_OK


COMMANDS = {"validate": _cmd_validate, "eval": _cmd_eval, "best-response": _cmd_best_response,
            "verify": _cmd_verify, "sweep": _cmd_sweep}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    try:
        scenario = _load(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"invalid scenario {args.scenario}:", file=sys.stderr)
        for issue in exc.issues:
            print(f"  {issue}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args, scenario)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        for issue in exc.issues:
            print(f"error: {issue}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        # out-of-range options such as --fixed-opponent or --grid
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
