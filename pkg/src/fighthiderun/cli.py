"""Command-line front end.

Exit codes: 0 success, 1 invalid scenario, 2 unreadable input, 3 a
simulation or findings check failed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Any, Sequence

from .analytic import Action, SurvivalTable
from .complex_arena import breakdown, p_s
from .multi_armed import g_curve_csv, peak_armed_count, proposition1_condition
from .oracle import (Z_THRESHOLD, EstimateReport, TrialConfig, compare, parse_strategy, reports_csv,
                     simulate_closed, simulate_complex, simulate_hallway, simulate_multi_armed, simulate_open)
from .policy import hallway_first_minute, hallway_survival, optimal_deviation, per_minute_comparison
from .scenario import (ClosedScenario, ComplexScenario, HallwayScenario, OpenScenario, RangeViolation, Setup,
                       ValidationError, validate)
from .sweep import SweepSpec, default_family, finding_checks, run_sweep, set_path
from .tables import table_for

SEED_ENV = "FIGHTHIDERUN_SEED"
EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_CHECK = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read_json(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path} must contain a JSON object")
    return data


def _parse_override(item: str) -> tuple[str, Any]:
    if "=" not in item:
        raise InputError(f"--set expects key=value, got {item!r}")
    key, text = item.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    return key.strip(), value


def _load_raw(args: argparse.Namespace) -> dict[str, Any]:
    raw = _read_json(args.file)
    for item in args.set or ():
        raw = set_path(raw, *_parse_override(item))
    return raw


def _load_setup(args: argparse.Namespace, extra_keys: Sequence[str] = ()) -> Setup:
    raw = _load_raw(args)
    setup = validate({k: v for k, v in raw.items() if k not in extra_keys})
    _echo_resolved(setup)
    return setup


def _echo_resolved(setup: Setup) -> None:
    print("# resolved " + json.dumps(setup.to_dict(), sort_keys=True))


def _armed_choices(args: argparse.Namespace) -> list[bool]:
    if args.armed is None:
        return [True, False]
    return [args.armed]


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError as exc:
        raise InputError(f"{SEED_ENV} must be an integer") from exc


# --- rendering ---------------------------------------------------------------------------

def _row_label(action: Action, armed: bool, both: bool) -> str:
    if action is Action.FIGHT and both:
        return f"fight ({'armed' if armed else 'unarmed'})"
    return action.value


def _table_rows(setup: Setup, armed_list: list[bool]) -> tuple[int, list[tuple[str, list[float]]]]:
    both = len(armed_list) > 1
    rows: list[tuple[str, list[float]]] = []
    horizon = 0
    base: SurvivalTable | None = None
    for armed in armed_list:
        table = table_for(setup, armed)
        horizon = table.horizon
        rows.append((_row_label(Action.FIGHT, armed, both), list(table.row(Action.FIGHT))))
        base = base or table
    for action in base.actions:
        if action is not Action.FIGHT:
            rows.append((action.value, list(base.row(action))))
    return horizon, rows


def render_table_text(horizon: int, rows: list[tuple[str, list[float]]]) -> str:
    width = max(len("minute"), *(len(label) for label, _ in rows))
    lines = ["minute".ljust(width) + "".join(f"{i:>8d}" for i in range(1, horizon + 1))]
    for label, values in rows:
        lines.append(label.ljust(width) + "".join(f"{v:8.3f}" for v in values))
    return "\n".join(lines) + "\n"


def render_table_csv(horizon: int, rows: list[tuple[str, list[float]]]) -> str:
    header = "minute," + ",".join(label.replace(" (", "_").rstrip(")") for label, _ in rows)
    lines = [header]
    for i in range(horizon):
        lines.append(f"{i + 1}," + ",".join(f"{values[i]:.6f}" for _, values in rows))
    return "\n".join(lines) + "\n"


# --- commands ----------------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    raw = _load_raw(args)
    setup = validate(raw)
    sc = setup.scenario
    print(json.dumps(setup.to_dict(), sort_keys=True))
    derived = {"T1": sc.T1}
    if isinstance(sc, ComplexScenario):
        derived["N2"] = sc.N2
    if isinstance(sc, OpenScenario) and sc.leftover:
        derived["leftover"] = sc.leftover
    print("# derived " + " ".join(f"{k}={v}" for k, v in derived.items()))
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    setup = _load_setup(args)
    if isinstance(setup.scenario, HallwayScenario):
        raise InputError("the hallway arena has no minute table; use 'policy'")
    if args.phases:
        if not isinstance(setup.scenario, ComplexScenario):
            raise InputError("--phases needs a complex arena")
        armed = args.armed if args.armed is not None else False
        sys.stdout.write(breakdown(setup.scenario, setup.armament, armed, setup.convention).to_csv())
        return EXIT_OK
    horizon, rows = _table_rows(setup, _armed_choices(args))
    render = render_table_text if args.format == "text" else render_table_csv
    sys.stdout.write(render(horizon, rows))
    return EXIT_OK


def cmd_policy(args: argparse.Namespace) -> int:
    setup = _load_setup(args)
    for armed in _armed_choices(args):
        label = "armed" if armed else "unarmed"
        if isinstance(setup.scenario, HallwayScenario):
            first = hallway_first_minute(setup.armament, armed)
            survival = hallway_survival(setup.scenario, setup.armament, armed, args.hallway_policy)
            print(f"[{label}] minute 1: {first.value}; survival after hiding into an arena {survival:.3f}")
            continue
        table = table_for(setup, armed)
        plan = optimal_deviation(table)
        if args.format == "csv":
            print(f"# {label}")
            sys.stdout.write(plan.to_csv())
        else:
            sys.stdout.write(f"[{label}] " + plan.render())
        if args.paper_view:
            verdicts = per_minute_comparison(table)
            print(f"[{label}] minute-by-minute: "
                  + ", ".join(f"{minute}:{action.value}" for minute, action in verdicts))
    return EXIT_OK


def _analytic_for_script(setup: Setup, script: tuple[Action, ...], armed: bool) -> float | None:
    sc = setup.scenario
    offset = sc.n if isinstance(sc, ComplexScenario) else 0
    if isinstance(sc, ComplexScenario) and len(script) == sc.n and all(a is Action.HIDE for a in script):
        return p_s(sc)
    tail = script[offset:]
    if not tail or any(a is not Action.HIDE for a in script[:offset]):
        return None
    if any(a is not Action.HIDE for a in tail[:-1]):
        return None
    table = table_for(setup, armed, "standard")
    if tail[-1] not in table.exact or len(tail) > table.horizon:
        return None
    return table[tail[-1], len(tail)]


def cmd_simulate(args: argparse.Namespace) -> int:
    setup = _load_setup(args)
    config = TrialConfig(args.trials, _seed(args), args.workers)
    armed = args.armed if args.armed is not None else True
    sc, arm = setup.scenario, setup.armament
    if isinstance(sc, HallwayScenario):
        report = simulate_hallway(sc, arm, armed, config, args.hallway_policy,
                                  hallway_survival(sc, arm, armed, args.hallway_policy))
    else:
        script = parse_strategy(args.strategy)
        analytic = _analytic_for_script(setup, script, armed)
        if setup.multi_armed is not None:
            report = simulate_multi_armed(sc, arm, setup.multi_armed, script, config, armed, analytic)
        elif isinstance(sc, ClosedScenario):
            report = simulate_closed(sc, arm.fight(armed), script, config, analytic)
        elif isinstance(sc, OpenScenario):
            report = simulate_open(sc, arm.fight(armed), arm.require("p_r"), script, config, analytic)
        else:
            report = simulate_complex(sc, arm, script, config, armed, analytic)
    print(f"# generator {report.generator}")
    sys.stdout.write(reports_csv([report]))
    return EXIT_OK if report.passed(args.threshold) else EXIT_CHECK


def cmd_compare(args: argparse.Namespace) -> int:
    setup = _load_setup(args)
    config = TrialConfig(args.trials, _seed(args), args.workers)
    reports: list[EstimateReport] = []
    for armed in _armed_choices(args):
        label = "armed" if armed else "unarmed"
        for r in compare(setup, config, armed):
            reports.append(EstimateReport(f"{label}.{r.quantity}", r.estimate, r.stderr, r.trials,
                                          r.seed, r.analytic, r.generator))
    print(f"# generator {reports[0].generator if reports else ''}")
    sys.stdout.write(reports_csv(reports))
    failed = [r for r in reports if not r.passed(args.threshold)]
    if failed:
        print(f"# {len(failed)} of {len(reports)} entries have |z| >= {args.threshold}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    raw = _load_raw(args)
    spec = SweepSpec.from_dict(raw)
    sys.stdout.write(run_sweep(spec, args.workers).to_csv())
    return EXIT_OK


def cmd_gcurve(args: argparse.Namespace) -> int:
    errors = []
    if args.pool < 2:
        errors.append(RangeViolation(f"--pool must be >= 2, got {args.pool}"))
    if not 0 <= args.pf < args.p2 <= 1:
        errors.append(RangeViolation(f"need 0 <= pf < p2 <= 1, got pf={args.pf}, p2={args.p2}"))
    if errors:
        raise ValidationError(errors)
    print(f"# peak j={peak_armed_count(args.p2, args.pf, args.pool)} "
          f"unimodality condition {'holds' if proposition1_condition(args.p2, args.pf, args.pool) else 'fails'}")
    sys.stdout.write(g_curve_csv(args.p2, args.pf, args.pool))
    return EXIT_OK


def cmd_check_findings(args: argparse.Namespace) -> int:
    raw = _load_raw(args)
    family = default_family()
    if "g_slice" in raw:
        family = replace(family, g_slice=tuple(tuple(x) for x in raw["g_slice"]))
    setup = validate({k: v for k, v in raw.items() if k != "g_slice"})
    _echo_resolved(setup)
    if setup.multi_armed is not None and not isinstance(setup.scenario, HallwayScenario):
        family = replace(family, example=setup)
    results = finding_checks(family)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


# --- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fighthiderun",
                                     description="Survival tables, optimal actions and Monte Carlo checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="scenario file (JSON)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a field, dotted for nested maps (e.g. armament.p2=0.4)")
        return p

    def armed_flags(p: argparse.ArgumentParser) -> None:
        group = p.add_mutually_exclusive_group()
        group.add_argument("--armed", dest="armed", action="store_true", default=None)
        group.add_argument("--unarmed", dest="armed", action="store_false")

    def mc_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--trials", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV}, else 0")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--threshold", type=float, default=Z_THRESHOLD)

    p = with_file("validate", "check a scenario file and print its resolved form")
    p.set_defaults(func=cmd_validate)

    p = with_file("table", "survival table")
    armed_flags(p)
    p.add_argument("--format", choices=("csv", "text"), default="text")
    p.add_argument("--phases", action="store_true", help="complex arena: per-phase breakdown CSV")
    p.set_defaults(func=cmd_table)

    p = with_file("policy", "optimal plan")
    armed_flags(p)
    p.add_argument("--format", choices=("csv", "text"), default="text")
    p.add_argument("--paper-view", action="store_true",
                   help="also print each minute's verdict judged on its own")
    p.add_argument("--hallway-policy", choices=("optimal", "hide"), default="optimal")
    p.set_defaults(func=cmd_policy)

    p = with_file("simulate", "Monte Carlo estimate for one strategy")
    armed_flags(p)
    mc_flags(p)
    p.add_argument("--strategy", default="H", help='e.g. "HHF" or "hide,hide,fight"')
    p.add_argument("--hallway-policy", choices=("optimal", "hide"), default="optimal")
    p.set_defaults(func=cmd_simulate)

    p = with_file("compare", "Monte Carlo estimate of every table entry")
    armed_flags(p)
    mc_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="evaluate a parameter grid")
    p.add_argument("file", help="sweep spec (scenario file plus an 'axes' list)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gcurve", help="joint-fight survival against the number of fighters")
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--pf", type=float, required=True)
    p.add_argument("--pool", type=int, required=True)
    p.set_defaults(func=cmd_gcurve)

    p = with_file("check-findings", "check the qualitative findings on a scenario family")
    p.set_defaults(func=cmd_check_findings)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        for err in exc.errors:
            print(f"invalid ({err.kind}): {err.message}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
