"""Parameter sweeps over scenario files and checks of the qualitative findings.

A sweep spec is a scenario map plus an ``axes`` list; each axis names a
field (dotted for nested maps, e.g. ``armament.p2``) and lists its values.
Every grid point is validated; invalid points are reported, never adjusted.
The ``gcurve`` pseudo-arena sweeps the joint-fight survival ``g`` directly.
"""
from __future__ import annotations

import copy
import csv
import io
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .analytic import Action, SurvivalTable, closed_table
from .multi_armed import g, peak_armed_count, proposition1_condition
from .policy import ActionPlan, hallway_first_minute, hallway_survival, optimal_deviation
from .scenario import (ArmamentProfile, ClosedScenario, FloorRule, HallwayScenario, MultiArmedProfile,
                       OpenScenario, RangeViolation, Setup, ValidationError, Violation, validate)
from .tables import table_for

TABLE_OUTPUTS = ("armed_action1", "armed_deviation", "armed_survival",
                 "unarmed_action1", "unarmed_deviation", "unarmed_survival", "gap")
GCURVE_OUTPUTS = ("g", "g_peak", "proposition1")


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[Any, ...]


@dataclass(frozen=True)
class SweepSpec:
    base: Mapping[str, Any]
    axes: tuple[Axis, ...] = ()
    outputs: tuple[str, ...] | None = None

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> SweepSpec:
        base = {k: v for k, v in raw.items() if k not in ("axes", "outputs")}
        axes = []
        for item in raw.get("axes", []):
            if isinstance(item, Mapping):
                name, values = item["name"], item["values"]
            else:
                name, values = item
            if isinstance(values, (str, bytes)) or not isinstance(values, Sequence):
                raise ValidationError([RangeViolation(f"axis {name!r} needs an explicit list of values")])
            axes.append(Axis(name, tuple(values)))
        outputs = raw.get("outputs")
        return cls(base, tuple(axes), tuple(outputs) if outputs is not None else None)

    @property
    def resolved_outputs(self) -> tuple[str, ...]:
        if self.outputs is not None:
            return self.outputs
        return GCURVE_OUTPUTS if self.base.get("arena") == "gcurve" else TABLE_OUTPUTS

    def points(self) -> list[tuple[Any, ...]]:
        return list(itertools.product(*(axis.values for axis in self.axes)))


@dataclass(frozen=True)
class SweepRow:
    point: tuple[Any, ...]
    values: Mapping[str, Any] = field(default_factory=dict)
    skipped: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.skipped


@dataclass(frozen=True)
class SweepResult:
    axes: tuple[str, ...]
    outputs: tuple[str, ...]
    rows: tuple[SweepRow, ...]

    @property
    def skipped(self) -> list[SweepRow]:
        return [r for r in self.rows if not r.ok]

    def column(self, name: str) -> list[Any]:
        return [r.values.get(name) for r in self.rows if r.ok]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([*self.axes, "status", *self.outputs])
        for row in self.rows:
            status = "ok" if row.ok else "skipped: " + "; ".join(row.skipped)
            writer.writerow([v if isinstance(v, str) else json.dumps(v) for v in row.point] + [status]
                            + [_fmt(row.values.get(name)) for name in self.outputs])
        return buf.getvalue()


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, Action):
        return value.value
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value)
    return str(value)


def _sort_key(point: tuple[Any, ...]) -> tuple:
    return tuple((0, v, "") if isinstance(v, (int, float)) and not isinstance(v, bool)
                 else (1, 0, json.dumps(v, sort_keys=True)) for v in point)


def set_path(raw: Mapping[str, Any], dotted: str, value: Any) -> dict[str, Any]:
    """Copy of ``raw`` with the dotted field set to ``value``."""
    out = copy.deepcopy(dict(raw))
    node = out
    *parents, leaf = dotted.split(".")
    for key in parents:
        node = node.setdefault(key, {})
    node[leaf] = value
    return out


def _plan_outputs(table: SurvivalTable, prefix: str) -> tuple[dict[str, Any], ActionPlan]:
    plan = optimal_deviation(table)
    return {
        f"{prefix}_action1": plan.actions[0] if plan.actions else None,
        f"{prefix}_deviation": plan.deviation_minute,
        f"{prefix}_survival": plan.probability,
    }, plan


def evaluate_setup(setup: Setup) -> dict[str, Any]:
    """Armed and unarmed optimal plans and their survival gap."""
    if isinstance(setup.scenario, HallwayScenario):
        out = {}
        for armed, prefix in ((True, "armed"), (False, "unarmed")):
            out[f"{prefix}_action1"] = hallway_first_minute(setup.armament, armed).value
            out[f"{prefix}_deviation"] = None
            out[f"{prefix}_survival"] = hallway_survival(setup.scenario, setup.armament, armed)
    else:
        out, _ = _plan_outputs(table_for(setup, True), "armed")
        out.update(_plan_outputs(table_for(setup, False), "unarmed")[0])
    out["gap"] = out["armed_survival"] - out["unarmed_survival"]
    return out


def evaluate_gcurve(raw: Mapping[str, Any]) -> dict[str, Any]:
    errors: list[Violation] = []
    unknown = set(raw) - {"arena", "p2", "p_f", "N_pool", "j"}
    if unknown:
        errors.append(RangeViolation(f"unknown fields {sorted(unknown)}"))
    for name in ("p2", "p_f", "N_pool"):
        if name not in raw:
            errors.append(RangeViolation(f"{name} is missing"))
    if errors:
        raise ValidationError(errors)
    p2, p_f, pool = raw["p2"], raw["p_f"], raw["N_pool"]
    if not (isinstance(pool, int) and pool >= 2):
        errors.append(RangeViolation(f"N_pool must be an integer >= 2, got {pool!r}"))
    if not 0 <= p_f < p2 <= 1:
        errors.append(RangeViolation(f"need 0 <= p_f < p2 <= 1, got p_f={p_f}, p2={p2}"))
    j = raw.get("j")
    if j is not None and not (isinstance(j, int) and isinstance(pool, int) and 1 <= j <= pool):
        errors.append(RangeViolation(f"j must be an integer in [1, N_pool], got {j!r}"))
    if errors:
        raise ValidationError(errors)
    return {
        "g": g(p2, p_f, j, pool) if j is not None else None,
        "g_peak": peak_armed_count(p2, p_f, pool),
        "proposition1": proposition1_condition(p2, p_f, pool),
    }


def evaluate_point(raw: Mapping[str, Any]) -> dict[str, Any]:
    if raw.get("arena") == "gcurve":
        return evaluate_gcurve(raw)
    return evaluate_setup(validate(raw))


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every grid point; rows come back sorted by axis values."""
    outputs = spec.resolved_outputs

    def one(point: tuple[Any, ...]) -> SweepRow:
        raw = dict(spec.base)
        for axis, value in zip(spec.axes, point):
            raw = set_path(raw, axis.name, value)
        try:
            values = evaluate_point(raw)
        except ValidationError as exc:
            return SweepRow(point, skipped=tuple(f"{e.kind}: {e.message}" for e in exc.errors))
        return SweepRow(point, {k: values.get(k) for k in outputs})

    points = sorted(spec.points(), key=_sort_key)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, points))
    else:
        rows = [one(p) for p in points]
    return SweepResult(tuple(a.name for a in spec.axes), outputs, tuple(rows))


# --- qualitative findings -------------------------------------------------------------------

@dataclass(frozen=True)
class FindingFamily:
    """Scenarios on which the findings are checked.

    ``closed`` x ``p_grid`` drives the single-civilian checks, ``example`` is
    an open arena with several armed civilians and ``g_slice`` lists
    ``(p2, p_f, N_pool)`` triples for the friendly-fire check.
    """

    closed: tuple[ClosedScenario, ...]
    armament: ArmamentProfile
    p_grid: tuple[float, ...]
    example: Setup
    g_slice: tuple[tuple[float, float, int], ...]


@dataclass(frozen=True)
class FindingResult:
    finding: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} ({self.finding}) {self.detail}"


def example_setup(p_f: float = 0.1) -> Setup:
    """Open arena of 210 civilians with many armed civilians."""
    return Setup(OpenScenario(N=210, m=15, e=25, T2=4),
                 ArmamentProfile(p1=0.05, p2=0.3, p_r=0.1),
                 MultiArmedProfile(p_f=p_f, K_schedule=FloorRule(4), j_schedule=FloorRule(20)))


def default_family(g_slice: Sequence[tuple[float, float, int]] = ((0.45, 0.2, 20), (0.3, 0.1, 210))
                   ) -> FindingFamily:
    closed = tuple(ClosedScenario(N, m, T2)
                   for N in (20, 30, 60) for m in (5, 10, 15, 20) if N % m == 0 and m < N
                   for T2 in range(1, 8))
    return FindingFamily(
        closed=closed,
        armament=ArmamentProfile(p1=0.05, p2=0.3),
        p_grid=tuple(round(0.05 * k, 2) for k in range(1, 21)),
        example=example_setup(),
        g_slice=tuple(g_slice),
    )


def zero_friendly_fire_family() -> FindingFamily:
    """Same family with friendly fire switched off in the g slice."""
    family = default_family()
    return replace(family, g_slice=tuple((p2, 0.0, pool) for p2, _, pool in family.g_slice))


def _nonincreasing(values: Sequence[Fraction]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


def _deviation_key(plan: ActionPlan) -> float:
    return plan.deviation_minute if plan.deviation_minute is not None else float("inf")


def finding_checks(family: FindingFamily) -> list[FindingResult]:
    arm = family.armament
    closed_setups = [Setup(sc, arm) for sc in family.closed]
    tables = {(i, armed): table_for(s, armed) for i, s in enumerate(closed_setups) for armed in (True, False)}
    plans = {key: optimal_deviation(t) for key, t in tables.items()}
    results = []

    # (i) survival falls over time whatever the action
    bad = []
    for (i, armed), t in [*tables.items(), (("example", True), table_for(family.example, True))]:
        active = min(t.T1, t.T2)
        hide = t.exact[Action.HIDE]
        fight = t.exact[Action.FIGHT][:active]
        if not (_nonincreasing(hide) and _nonincreasing(fight)):
            bad.append(f"{i}/{'armed' if armed else 'unarmed'}")
    results.append(FindingResult("i", not bad, f"{len(tables) + 1} tables, nonincreasing rows"
                                 + (f"; violated by {bad}" if bad else "")))

    # (ii) unarmed civilians sometimes have to fight
    fights = [family.closed[i] for (i, armed), plan in plans.items()
              if not armed and plan.deviation_action is Action.FIGHT]
    results.append(FindingResult("ii", bool(fights), f"{len(fights)} scenarios where the unarmed plan fights"))

    # (iii) a firearm does not always help
    no_gain = [family.closed[i] for i in range(len(family.closed))
               if plans[i, True].hides_throughout and plans[i, True].exact == plans[i, False].exact]
    results.append(FindingResult("iii", bool(no_gain),
                                 f"{len(no_gain)} scenarios where the armed plan hides and gains nothing"))

    # (iv) higher fight success never delays resistance
    late = []
    for sc in family.closed:
        minutes = [_deviation_key(optimal_deviation(closed_table(sc, p))) for p in sorted(family.p_grid)]
        if any(b > a for a, b in zip(minutes, minutes[1:])):
            late.append(sc)
    results.append(FindingResult("iv", not late, f"{len(family.closed)} scenarios x {len(family.p_grid)} p values"
                                 + (f"; non-monotone in {late}" if late else "")))

    # (v) hiding can be best for an armed civilian
    single = Setup(family.example.scenario, family.example.armament)
    single_plan = optimal_deviation(table_for(single, True))
    results.append(FindingResult("v", single_plan.hides_throughout,
                                 f"single armed civilian in the example arena: {single_plan.render().splitlines()[0]}"))

    # (vi) more armed civilians can hurt through friendly fire
    falls = [(p2, p_f, pool) for p2, p_f, pool in family.g_slice if peak_armed_count(p2, p_f, pool) < pool]
    results.append(FindingResult("vi", bool(falls),
                                 f"{len(falls)}/{len(family.g_slice)} g curves fall after their peak"))
    return results

