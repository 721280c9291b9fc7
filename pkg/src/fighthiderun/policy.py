"""Turning survival tables into recommended actions.

The sequential rule hides until the first minute where fighting or running
beats hiding, then deviates once.  Comparisons are made on the exact table
entries, and equality counts as a win for hiding.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .analytic import Action, CaseTag, SurvivalTable, case_tag, closed_table
from .scenario import ArmamentProfile, ClosedScenario, DegenerateScenario, HallwayScenario


@dataclass(frozen=True)
class ActionPlan:
    """Hide until ``deviation_minute`` (if any), then fight or run."""

    actions: tuple[Action, ...]
    probabilities: tuple[float, ...]
    exact: Fraction
    rule: str
    trace: tuple[str, ...]

    @property
    def probability(self) -> float:
        return float(self.exact)

    @property
    def deviation_minute(self) -> int | None:
        last = self.actions[-1] if self.actions else Action.HIDE
        return len(self.actions) if last is not Action.HIDE else None

    @property
    def deviation_action(self) -> Action | None:
        return self.actions[-1] if self.deviation_minute else None

    @property
    def hides_throughout(self) -> bool:
        return self.deviation_minute is None

    def to_csv(self) -> str:
        lines = ["minute,action,probability"]
        lines += [f"{i},{a.value},{p:.6f}"
                  for i, (a, p) in enumerate(zip(self.actions, self.probabilities), 1)]
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        if self.hides_throughout:
            head = f"hide throughout: survival {self.probability:.3f}"
        else:
            waited = self.deviation_minute - 1
            prefix = f"hide for {waited} minute(s), then " if waited else ""
            head = (f"{prefix}{self.deviation_action.value} at minute {self.deviation_minute}: "
                    f"survival {self.probability:.3f} ({self.rule})")
        return "\n".join([head, *("  " + t for t in self.trace)]) + "\n"


def _best_deviation(table: SurvivalTable, minute: int) -> tuple[Action, Fraction]:
    best = (Action.FIGHT, table.entry(Action.FIGHT, minute))
    if Action.RUN in table.exact:
        run = table.entry(Action.RUN, minute)
        if run > best[1]:
            best = (Action.RUN, run)
    return best


def optimal_deviation(table: SurvivalTable) -> ActionPlan:
    """Scan minutes in order and deviate at the first strict improvement over hiding.

    When the shooter clears the arena before the authority arrives, a
    civilian still hiding at minute ``T1`` is forced to fight or run.
    """
    actions: list[Action] = []
    probs: list[float] = []
    trace: list[str] = []
    for minute in range(1, table.horizon + 1):
        hide = table.entry(Action.HIDE, minute)
        action, value = _best_deviation(table, minute)
        cmp = f"minute {minute}: {action.value}={float(value):.3f} vs hide={float(hide):.3f}"
        if minute == table.endgame_minute and value > 0:
            rule = "endgame"
            trace.append(cmp + " -> " + action.value + " (hiding is fatal at T1)")
        elif value > hide:
            rule = "comparison"
            trace.append(cmp + " -> " + action.value)
        else:
            actions.append(Action.HIDE)
            probs.append(float(hide))
            trace.append(cmp + " -> hide")
            continue
        actions.append(action)
        probs.append(float(value))
        return ActionPlan(tuple(actions), tuple(probs), value, rule, tuple(trace))
    final = table.entry(Action.HIDE, table.horizon) if table.horizon else Fraction(1)
    return ActionPlan(tuple(actions), tuple(probs), final, "hide-throughout", tuple(trace))


def per_minute_comparison(table: SurvivalTable) -> list[tuple[int, Action]]:
    """Best action at each minute judged on its own, ignoring earlier choices."""
    out = []
    for minute in range(1, table.horizon + 1):
        action, value = _best_deviation(table, minute)
        out.append((minute, action if value > table.entry(Action.HIDE, minute) else Action.HIDE))
    return out


def hide_threshold_exact(scenario: ClosedScenario) -> Fraction:
    """Largest fight probability for which hiding wins every comparison.

    The per-minute break-even ``1 - m/(N - (k-1)m)`` decreases in ``k``, so the
    binding minute is the last one compared: ``T2`` when the authority comes
    first, ``T1 - 1`` otherwise.  For ``T2 = 2`` this is ``1 - m/(N - m)``.
    """
    N, m = scenario.N, scenario.m
    if N == m:
        raise DegenerateScenario("N = m: every hiding civilian dies in minute 1")
    last = scenario.T2 if case_tag(scenario.T1, scenario.T2) is CaseTag.AUTHORITY_FIRST else scenario.T1 - 1
    return 1 - Fraction(m, N - (last - 1) * m)


def hide_threshold(scenario: ClosedScenario) -> float:
    return float(hide_threshold_exact(scenario))


class HallwayAction(str, enum.Enum):
    HIDE = "hide"
    RUN = "run"
    FIGHT = "fight"


def hallway_first_minute(armament: ArmamentProfile, armed: bool) -> HallwayAction:
    """Argmax of hide/run/fight success in the hallway; ties favour hide, then run."""
    options = [
        (armament.require("p_h"), HallwayAction.HIDE),
        (armament.require("p_r"), HallwayAction.RUN),
        (armament.fight_tilde(armed), HallwayAction.FIGHT),
    ]
    best = options[0]
    for option in options[1:]:
        if option[0] > best[0]:
            best = option
    return best[1]


def arena_survival(scenario: ClosedScenario, p: float, policy: str = "optimal") -> Fraction:
    """Survival inside one closed arena under the optimal plan or pure hiding."""
    table = closed_table(scenario, p)
    if policy == "optimal":
        return optimal_deviation(table).exact
    if policy == "hide":
        return table.entry(Action.HIDE, table.horizon)
    raise ValueError(f"policy must be 'optimal' or 'hide', got {policy!r}")


def hallway_round_deadlines(hallway: HallwayScenario) -> list[int]:
    """Minutes the shooter spends in the focal arena before the authority arrives,
    for each possible search position ``r = 1..K``."""
    return [hallway.T2 - 1 - (r - 1) * hallway.T1 for r in range(1, hallway.K + 1)]


def hallway_survival_exact(hallway: HallwayScenario, armament: ArmamentProfile, armed: bool,
                           policy: str = "optimal") -> Fraction:
    p = armament.fight(armed)
    total = Fraction(0)
    reach = Fraction(1)  # probability the shooter has not yet entered the focal arena
    for r, remaining in enumerate(hallway_round_deadlines(hallway), 1):
        enter = Fraction(1, hallway.K - r + 1)
        if remaining <= 0:
            survive = Fraction(1)
        else:
            survive = arena_survival(hallway.arena_template(remaining), p, policy)
        total += reach * enter * survive
        reach *= 1 - enter
    return Fraction(armament.require("p_h")) * total


def hallway_survival(hallway: HallwayScenario, armament: ArmamentProfile, armed: bool,
                     policy: str = "optimal") -> float:
    """Survival after hiding into one of the K arenas during the hallway minute.

    The shooter searches the arenas in uniformly random order, spending
    ``T1`` minutes in each.  If the authority arrives before he reaches the
    focal arena the civilian survives; otherwise the closed-arena analysis
    applies with the time that is left.  ``policy="hide"`` keeps hiding inside
    the arena instead of following the optimal plan.
    """
    return float(hallway_survival_exact(hallway, armament, armed, policy))
