"""Scenario parameter bundles and their validation.

Every arena model is an immutable dataclass that checks its own invariants on
construction, so a scenario object that exists is a scenario every downstream
formula can consume.  All violations are collected before raising, never only
the first one.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from typing import Any, Mapping, Sequence, Union

ARENAS = ("closed", "open", "complex", "hallway")


class Violation(ValueError):
    """One broken scenario invariant."""

    kind = "violation"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.message!r})"


class DivisibilityViolation(Violation):
    kind = "divisibility"


class OrderingViolation(Violation):
    kind = "ordering"


class RangeViolation(Violation):
    kind = "range"


class ScheduleViolation(Violation):
    kind = "schedule"


class ValidationError(ValueError):
    """Raised with the full list of violated invariants."""

    def __init__(self, errors: Sequence[Violation]):
        self.errors = list(errors)
        super().__init__("; ".join(f"{e.kind}: {e.message}" for e in self.errors))


class OutOfHorizon(IndexError):
    pass


class DegenerateScenario(ValueError):
    pass


class ScheduleWarning(UserWarning):
    pass


def _raise_if(errors: list[Violation]) -> None:
    if errors:
        raise ValidationError(errors)


def _check_ints(obj: Any, names: Sequence[str], minimum: Mapping[str, int]) -> dict[str, Violation]:
    """Range errors keyed by field, so later checks can skip only the broken fields."""
    errors: dict[str, Violation] = {}
    for name in names:
        value = getattr(obj, name)
        if isinstance(value, bool) or not isinstance(value, int):
            errors[name] = RangeViolation(f"{name} must be an integer, got {value!r}")
        elif value < minimum.get(name, 1):
            errors[name] = RangeViolation(f"{name} must be >= {minimum.get(name, 1)}, got {value}")
    return errors


def _usable(bad: Mapping[str, Violation], *names: str) -> bool:
    return not any(name in bad for name in names)


def _check_prob(name: str, value: Any) -> list[Violation]:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or math.isnan(value):
        return [RangeViolation(f"{name} must be a number, got {value!r}")]
    if not 0 < value <= 1:
        return [RangeViolation(f"{name} must lie in (0, 1], got {value}")]
    return []


@dataclass(frozen=True)
class ClosedScenario:
    """N civilians in a room with no exit, shooter kills m per minute."""

    N: int
    m: int
    T2: int

    def __post_init__(self) -> None:
        _raise_if(self.violations())

    def violations(self) -> list[Violation]:
        bad = _check_ints(self, ("N", "m", "T2"), {})
        errors = list(bad.values())
        if _usable(bad, "N", "m") and self.N % self.m:
            errors.append(DivisibilityViolation(f"N={self.N} is not a multiple of m={self.m}"))
        return errors

    @property
    def T1(self) -> int:
        return self.N // self.m

    @property
    def arena(self) -> str:
        return "closed"


@dataclass(frozen=True)
class OpenScenario:
    """N civilians in an open arena; e leave and m are killed each minute.

    T1 is ``N // (e + m)``.  When ``N`` is not a multiple of ``e + m`` the
    leftover civilians are carried in the final minute's pool (the Example-1
    instance N=210, e+m=40 is of this kind and is documented with T1=5).
    """

    N: int
    m: int
    e: int
    T2: int

    def __post_init__(self) -> None:
        _raise_if(self.violations())

    def violations(self) -> list[Violation]:
        bad = _check_ints(self, ("N", "m", "e", "T2"), {})
        errors = list(bad.values())
        if _usable(bad, "N", "m", "e") and self.e >= self.N - self.m:
            errors.append(OrderingViolation(f"need e < N - m, got e={self.e}, N-m={self.N - self.m}"))
        return errors

    @property
    def T1(self) -> int:
        return self.N // (self.e + self.m)

    @property
    def leftover(self) -> int:
        return self.N % (self.e + self.m)

    @property
    def arena(self) -> str:
        return "open"


@dataclass(frozen=True)
class ComplexScenario:
    """Three-phase arena: confusion, saturated exits, then seek-and-shoot.

    T2 counts minutes of Phase 2, following the layout of the Phase-2 tables.
    """

    N: int
    N1: int
    m1: int
    m2: int
    e1: int
    e2: int
    n: int
    T2: int

    def __post_init__(self) -> None:
        _raise_if(self.violations())

    def violations(self) -> list[Violation]:
        bad = _check_ints(self, ("N", "N1", "m1", "m2", "e1", "e2", "n", "T2"), {"n": 0})
        errors = list(bad.values())
        if _usable(bad, "N", "N1") and not self.N > self.N1:
            errors.append(OrderingViolation(f"need N > N1, got N={self.N}, N1={self.N1}"))
        if _usable(bad, "m1", "m2") and not self.m1 > self.m2:
            errors.append(OrderingViolation(f"need m1 > m2, got m1={self.m1}, m2={self.m2}"))
        if not _usable(bad, "N1", "n", "e1", "m1", "e2", "m2"):
            return errors
        if self.N2 < 1:
            errors.append(RangeViolation(f"N2 = N1 - n(e1+m1) = {self.N2} must be positive"))
        elif self.N2 % (self.e2 + self.m2):
            errors.append(DivisibilityViolation(
                f"N2={self.N2} is not a multiple of e2+m2={self.e2 + self.m2}"))
        return errors

    @property
    def N2(self) -> int:
        return self.N1 - self.n * (self.e1 + self.m1)

    @property
    def T1(self) -> int:
        return self.N2 // (self.e2 + self.m2)

    @property
    def arena(self) -> str:
        return "complex"


@dataclass(frozen=True)
class HallwayScenario:
    """M civilians in a hallway next to K closed arenas of N civilians each."""

    M: int
    K: int
    N: int
    m: int
    T2: int

    def __post_init__(self) -> None:
        _raise_if(self.violations())

    def violations(self) -> list[Violation]:
        bad = _check_ints(self, ("M", "K", "N", "m", "T2"), {})
        errors = list(bad.values())
        if not _usable(bad, "M", "K", "N", "m"):
            return errors
        if not self.N * self.K < self.M:
            errors.append(OrderingViolation(f"need N < M/K, got N={self.N}, M/K={self.M / self.K:g}"))
        if self.N % self.m:
            errors.append(DivisibilityViolation(f"N={self.N} is not a multiple of m={self.m}"))
        return errors

    @property
    def T1(self) -> int:
        return self.N // self.m

    def arena_template(self, T2: int) -> ClosedScenario:
        return ClosedScenario(N=self.N, m=self.m, T2=T2)

    @property
    def arena(self) -> str:
        return "hallway"


Scenario = Union[ClosedScenario, OpenScenario, ComplexScenario, HallwayScenario]


@dataclass(frozen=True)
class ArmamentProfile:
    """Single-civilian success probabilities.

    ``p1``/``p2`` are unarmed/armed fight success in a closed or open arena
    (and Phase 2 of a complex arena); the tilde variants apply in the hallway
    and in Phase 1.  ``p_r`` is the open/hallway/Phase-1 run success,
    ``p_r_tilde`` the Phase-2 run success and ``p_h`` the hallway hide success.
    """

    p1: float
    p2: float
    p_tilde1: float | None = None
    p_tilde2: float | None = None
    p_r: float | None = None
    p_r_tilde: float | None = None
    p_h: float | None = None

    def __post_init__(self) -> None:
        _raise_if(self.violations())

    def violations(self) -> list[Violation]:
        errors: list[Violation] = []
        bad = set()
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                found = _check_prob(f.name, value)
                errors += found
                bad |= {f.name} if found else set()
        if bad & {"p1", "p2"}:
            return errors
        if not self.p1 < self.p2:
            errors.append(OrderingViolation(f"need p1 < p2, got p1={self.p1}, p2={self.p2}"))
        if (self.p_tilde1 is None) != (self.p_tilde2 is None):
            errors.append(RangeViolation("p_tilde1 and p_tilde2 must be given together"))
        elif self.p_tilde1 is not None and not bad & {"p_tilde1", "p_tilde2"} \
                and not self.p_tilde1 < self.p_tilde2:
            errors.append(OrderingViolation(
                f"need p_tilde1 < p_tilde2, got {self.p_tilde1}, {self.p_tilde2}"))
        return errors

    def fight(self, armed: bool) -> float:
        return self.p2 if armed else self.p1

    def fight_tilde(self, armed: bool) -> float:
        return self.require("p_tilde2" if armed else "p_tilde1")

    def require(self, name: str) -> float:
        value = getattr(self, name)
        if value is None:
            raise ValidationError([RangeViolation(f"armament.{name} is required here")])
        return value


@dataclass(frozen=True)
class FloorRule:
    """``max(1, pool // divisor)``: the schedule rule of the worked example."""

    divisor: int

    def __call__(self, minute: int, pool: int) -> int:
        return max(1, pool // self.divisor)

    def to_json(self) -> str:
        return f"floor:{self.divisor}"


ScheduleSpec = Union[FloorRule, tuple]


def parse_schedule(raw: Any) -> ScheduleSpec:
    """Accept ``"floor:4"``, ``{"floor": 4}`` or an explicit integer list."""
    if isinstance(raw, FloorRule):
        return raw
    if isinstance(raw, str) and raw.startswith("floor:"):
        return FloorRule(int(raw.split(":", 1)[1]))
    if isinstance(raw, Mapping) and "floor" in raw:
        return FloorRule(int(raw["floor"]))
    if isinstance(raw, (list, tuple)) and all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
        return tuple(raw)
    raise ValidationError([ScheduleViolation(f"unrecognised schedule {raw!r}")])


def _schedule_value(spec: ScheduleSpec, minute: int, pool: int) -> int:
    if isinstance(spec, FloorRule):
        return spec(minute, pool)
    if minute > len(spec):
        raise ValidationError([ScheduleViolation(
            f"explicit schedule has {len(spec)} entries, minute {minute} requested")])
    return spec[minute - 1]


@dataclass(frozen=True)
class MultiArmedProfile:
    """Armed-civilian schedules and friendly-fire probabilities.

    ``K_schedule`` gives the armed civilians alive at each minute and
    ``j_schedule`` how many of them join a fight started that minute.
    ``p_f_tilde`` is the Phase-2 friendly-fire probability of a complex arena.
    """

    p_f: float
    K_schedule: ScheduleSpec = FloorRule(4)
    j_schedule: ScheduleSpec = FloorRule(20)
    p_f_tilde: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "K_schedule", parse_schedule(self.K_schedule))
        object.__setattr__(self, "j_schedule", parse_schedule(self.j_schedule))
        _raise_if(self.violations())

    def violations(self) -> list[Violation]:
        errors = _check_prob("p_f", self.p_f)
        if self.p_f_tilde is not None:
            errors += _check_prob("p_f_tilde", self.p_f_tilde)
        return errors

    def c(self, p2: float) -> float:
        return self.p_f / p2

    def compatibility(self, armament: ArmamentProfile) -> list[Violation]:
        errors: list[Violation] = []
        if not 0 < self.c(armament.p2) < 1:
            errors.append(OrderingViolation(
                f"need p_f = c*p2 with 0 < c < 1, got p_f={self.p_f}, p2={armament.p2}"))
        if self.p_f_tilde is not None and armament.p_tilde2 is not None \
                and not self.p_f_tilde < armament.p_tilde2:
            errors.append(OrderingViolation(
                f"need p_f_tilde < p_tilde2, got {self.p_f_tilde}, {armament.p_tilde2}"))
        return errors

    def schedules(self, pools: Sequence[int], m: int | None = None) -> tuple[list[int], list[int]]:
        """Return ``(K, j)`` for minutes ``1..len(pools)`` given start-of-minute pools."""
        K = [_schedule_value(self.K_schedule, i, pool) for i, pool in enumerate(pools, 1)]
        j = [_schedule_value(self.j_schedule, i, pool) for i, pool in enumerate(pools, 1)]
        errors: list[Violation] = []
        for i, (k, jj, pool) in enumerate(zip(K, j, pools), 1):
            if not 1 <= jj <= k <= pool:
                errors.append(ScheduleViolation(
                    f"minute {i}: need 1 <= j <= K <= N_i, got j={jj}, K={k}, N_i={pool}"))
            if i > 1:
                if jj > j[i - 2]:
                    errors.append(ScheduleViolation(f"minute {i}: j increased from {j[i - 2]} to {jj}"))
                if k > K[i - 2]:
                    errors.append(ScheduleViolation(f"minute {i}: K increased from {K[i - 2]} to {k}"))
                if m is not None:
                    if not k - K[i - 2] < m:
                        errors.append(ScheduleViolation(f"minute {i}: K_i - K_(i-1) must be < m"))
                    elif K[i - 2] - k >= m:
                        warnings.warn(
                            f"minute {i}: armed civilians drop by {K[i - 2] - k} >= m={m}",
                            ScheduleWarning, stacklevel=2)
        _raise_if(errors)
        return K, j


def present_civilians(scenario: Scenario, minute: int) -> int:
    """Civilians present at the start of ``minute`` (1-based)."""
    _check_minute(scenario, minute)
    if isinstance(scenario, (ClosedScenario, HallwayScenario)):
        return scenario.N - (minute - 1) * scenario.m
    if isinstance(scenario, OpenScenario):
        return scenario.N - (minute - 1) * (scenario.e + scenario.m)
    return scenario.N2 - (minute - 1) * (scenario.e2 + scenario.m2)


def remaining_civilians(scenario: Scenario, minute: int) -> int:
    """Pool the shooter's victims are drawn from during ``minute``.

    For arenas with exits, this is the start-of-minute pool minus that
    minute's exiters (the exiters are never shot).
    """
    _check_minute(scenario, minute)
    if isinstance(scenario, (ClosedScenario, HallwayScenario)):
        return scenario.N - (minute - 1) * scenario.m
    if isinstance(scenario, OpenScenario):
        return (scenario.N - scenario.e) - (minute - 1) * (scenario.e + scenario.m)
    return (scenario.N2 - scenario.e2) - (minute - 1) * (scenario.e2 + scenario.m2)


def _check_minute(scenario: Scenario, minute: int) -> None:
    if not 1 <= minute <= scenario.T1:
        raise OutOfHorizon(f"minute {minute} outside [1, T1={scenario.T1}]")


_SCENARIO_TYPES = {
    "closed": (ClosedScenario, ("N", "m", "T2")),
    "open": (OpenScenario, ("N", "m", "e", "T2")),
    "complex": (ComplexScenario, ("N", "N1", "m1", "m2", "e1", "e2", "n", "T2")),
    "hallway": (HallwayScenario, ("M", "K", "N", "m", "T2")),
}

CONVENTIONS = ("standard", "continuation")


@dataclass(frozen=True)
class Setup:
    """A validated scenario file: arena, armament and optional multi-armed profile."""

    scenario: Scenario
    armament: ArmamentProfile
    multi_armed: MultiArmedProfile | None = None
    convention: str = "standard"

    @property
    def arena(self) -> str:
        return self.scenario.arena

    def to_dict(self) -> dict[str, Any]:
        kind, names = self.arena, _SCENARIO_TYPES[self.arena][1]
        out: dict[str, Any] = {"arena": kind}
        out.update({name: getattr(self.scenario, name) for name in names})
        out["armament"] = {f.name: getattr(self.armament, f.name)
                           for f in fields(self.armament) if getattr(self.armament, f.name) is not None}
        if self.multi_armed is not None:
            ma = self.multi_armed
            out["multi_armed"] = {
                "p_f": ma.p_f,
                "K_schedule": _schedule_json(ma.K_schedule),
                "j_schedule": _schedule_json(ma.j_schedule),
            }
            if ma.p_f_tilde is not None:
                out["multi_armed"]["p_f_tilde"] = ma.p_f_tilde
        if self.convention != "standard":
            out["convention"] = self.convention
        return out


def _schedule_json(spec: ScheduleSpec) -> Any:
    return spec.to_json() if isinstance(spec, FloorRule) else list(spec)


def _build(cls: type, raw: Mapping[str, Any], names: Sequence[str], prefix: str,
           errors: list[Violation], optional: Sequence[str] = ()) -> Any:
    kwargs = {name: raw[name] for name in (*names, *optional) if name in raw}
    for name in names:
        if name not in raw and name not in optional:
            errors.append(RangeViolation(f"{prefix}{name} is missing"))
    unknown = set(raw) - set(names) - set(optional)
    if unknown:
        errors.append(RangeViolation(f"{prefix}unknown fields {sorted(unknown)}"))
    if any(name not in raw for name in names if name not in optional):
        return None
    try:
        return cls(**kwargs)
    except ValidationError as exc:
        errors.extend(exc.errors)
        return None


def validate(raw: Mapping[str, Any] | Setup | Scenario) -> Setup | Scenario:
    """Validate a parameter map into a :class:`Setup`.

    Typed objects are already valid and are returned unchanged.  On failure a
    :class:`ValidationError` lists every violated invariant.
    """
    if isinstance(raw, (Setup, ClosedScenario, OpenScenario, ComplexScenario, HallwayScenario)):
        return raw
    errors: list[Violation] = []
    arena = raw.get("arena")
    if arena not in _SCENARIO_TYPES:
        raise ValidationError([RangeViolation(f"arena must be one of {ARENAS}, got {arena!r}")])
    cls, names = _SCENARIO_TYPES[arena]
    scenario_raw = {k: v for k, v in raw.items()
                    if k not in ("arena", "armament", "multi_armed", "convention", "axes")}
    scenario = _build(cls, scenario_raw, names, "", errors)

    armament_names = [f.name for f in fields(ArmamentProfile)]
    armament = _build(ArmamentProfile, raw.get("armament") or {}, ("p1", "p2"), "armament.",
                      errors, optional=armament_names[2:])

    multi = None
    if raw.get("multi_armed") is not None:
        ma_raw = dict(raw["multi_armed"])
        try:
            multi = _build(MultiArmedProfile, ma_raw, ("p_f",), "multi_armed.", errors,
                           optional=("K_schedule", "j_schedule", "p_f_tilde"))
        except ValidationError as exc:
            errors.extend(exc.errors)
        if multi is not None and armament is not None:
            errors += multi.compatibility(armament)
        if multi is not None and scenario is not None and arena != "hallway":
            try:
                pools = [present_civilians(scenario, i) for i in range(1, scenario.T1 + 1)]
                m = scenario.m2 if arena == "complex" else scenario.m
                multi.schedules(pools, m)
            except ValidationError as exc:
                errors.extend(exc.errors)

    convention = raw.get("convention", "standard")
    if convention not in CONVENTIONS:
        errors.append(RangeViolation(f"convention must be one of {CONVENTIONS}, got {convention!r}"))

    _raise_if(errors)
    return Setup(scenario, armament, multi, convention)
