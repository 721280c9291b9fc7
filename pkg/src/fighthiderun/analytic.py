"""Closed- and open-arena survival tables.

Hiding products are accumulated as exact fractions of integer pool sizes and
only converted to binary64 at the end, so a row never picks up cumulative
rounding error.  Fight and run entries multiply the previous minute's hide
value by the success probability (``hide(0) = 1``).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .scenario import ClosedScenario, OpenScenario


class Action(str, enum.Enum):
    FIGHT = "fight"
    HIDE = "hide"
    RUN = "run"


class CaseTag(enum.Enum):
    AUTHORITY_FIRST = "T1>T2"
    SHOOTER_FINISHES = "T1<=T2"


def case_tag(T1: int, T2: int) -> CaseTag:
    return CaseTag.AUTHORITY_FIRST if T1 > T2 else CaseTag.SHOOTER_FINISHES


ROW_SEMANTICS = {
    Action.FIGHT: "hide in minutes 1..i-1, fight at minute i; probability of surviving the incident",
    Action.RUN: "hide in minutes 1..i-1, run at minute i; probability of surviving the incident",
    Action.HIDE: "hide in minutes 1..i; probability of being alive after minute i",
}


@dataclass(frozen=True)
class SurvivalTable:
    """Action x minute survival probabilities (minutes are 1-based).

    ``exact`` holds the entries as fractions; :attr:`values` is the float
    matrix in the order of :attr:`actions`.  ``endgame_minute`` is the minute
    at which hiding becomes fatal because the shooter clears the arena
    before the authority arrives (``None`` if that never happens).
    """

    exact: Mapping[Action, tuple[Fraction, ...]]
    T1: int | None = None
    T2: int | None = None
    convention: str = "standard"
    labels: Mapping[Action, str] = field(default_factory=dict)

    @property
    def actions(self) -> tuple[Action, ...]:
        return tuple(a for a in (Action.FIGHT, Action.HIDE, Action.RUN) if a in self.exact)

    @property
    def horizon(self) -> int:
        return len(self.exact[Action.HIDE])

    @property
    def case(self) -> CaseTag | None:
        if self.T1 is None or self.T2 is None:
            return None
        return case_tag(self.T1, self.T2)

    @property
    def endgame_minute(self) -> int | None:
        return self.T1 if self.case is CaseTag.SHOOTER_FINISHES else None

    @property
    def semantics(self) -> dict[Action, str]:
        return {a: ROW_SEMANTICS[a] for a in self.actions}

    @property
    def values(self) -> np.ndarray:
        return np.array([[float(x) for x in self.exact[a]] for a in self.actions])

    def row(self, action: Action | str) -> np.ndarray:
        return np.array([float(x) for x in self.exact[Action(action)]])

    def __getitem__(self, key: tuple[Action | str, int]) -> float:
        action, minute = key
        return float(self.entry(action, minute))

    def entry(self, action: Action | str, minute: int) -> Fraction:
        if not 1 <= minute <= self.horizon:
            raise IndexError(f"minute {minute} outside [1, {self.horizon}]")
        return self.exact[Action(action)][minute - 1]

    def scaled(self, factor: Fraction) -> SurvivalTable:
        return SurvivalTable({a: tuple(factor * x for x in row) for a, row in self.exact.items()},
                             self.T1, self.T2, self.convention, self.labels)

    def to_csv(self) -> str:
        header = "minute," + ",".join(self.labels.get(a, a.value) for a in self.actions)
        lines = [header]
        vals = self.values
        for i in range(self.horizon):
            lines.append(f"{i + 1}," + ",".join(f"{vals[r, i]:.6f}" for r in range(len(self.actions))))
        return "\n".join(lines) + "\n"


def _as_fraction(p: float | Fraction) -> Fraction:
    return p if isinstance(p, Fraction) else Fraction(p)


def exposed_pools(N: int, m: int, e: int, count: int) -> list[int]:
    """Pools the victims are drawn from in minutes ``1..count``."""
    return [(N - e) - (k - 1) * (e + m) for k in range(1, count + 1)]


def hide_products(pools: Iterable[int], m: int) -> list[Fraction]:
    """``[1, A_1, A_1 A_2, ...]`` with ``A_k = 1 - m / pool_k``."""
    out = [Fraction(1)]
    for pool in pools:
        out.append(out[-1] * Fraction(pool - m, pool))
    return out


def _open_hide_products(N: int, m: int, e: int, count: int) -> list[Fraction]:
    # e = 0 is allowed here (closed arena); public callers go through validation.
    return hide_products(exposed_pools(N, m, e, count), m)


def _cutoff(T1: int, T2: int, convention: str) -> tuple[int, int]:
    """Return (last minute computed by products, horizon)."""
    if convention == "standard":
        return min(T1, T2), max(T1, T2)
    if convention == "continuation":
        return T1, max(T1 + 1, T2)
    raise ValueError(f"unknown convention {convention!r}")


def _fight_schedule(p: float | Fraction | Sequence[float], count: int) -> list[Fraction]:
    if isinstance(p, (int, float, Fraction)):
        return [_as_fraction(p)] * count
    if len(p) < count:
        raise ValueError(f"need {count} per-minute fight probabilities, got {len(p)}")
    return [_as_fraction(x) for x in p[:count]]


def build_table(hide: Sequence[Fraction], T1: int, T2: int, fight: float | Sequence[float],
                run: float | None = None, convention: str = "standard") -> SurvivalTable:
    """Assemble a table from a hide-product prefix ``hide[0..T1]``.

    Before the cutoff, ``fight(i) = p_i hide(i-1)`` and ``run(i) = p_r hide(i-1)``.
    Afterwards every row takes the tail value: the hide probability at
    authority arrival when ``T1 > T2``, zero when the shooter clears the arena
    first.  The continuation convention ignores ``T2``, runs the products to
    ``T1`` and then repeats each row's last value.
    """
    L, horizon = _cutoff(T1, T2, convention)
    tail = hide[T2] if T1 > T2 else Fraction(0)
    fight_p = _fight_schedule(fight, L)
    rows: dict[Action, list[Fraction]] = {Action.FIGHT: [], Action.HIDE: []}
    if run is not None:
        rows[Action.RUN] = []
    r = _as_fraction(run) if run is not None else None
    for i in range(1, horizon + 1):
        if i <= L:
            rows[Action.FIGHT].append(fight_p[i - 1] * hide[i - 1])
            # standard Case II: hiding through T1 is fatal even with leftover civilians
            cleared = convention == "standard" and T1 <= T2 and i == T1
            rows[Action.HIDE].append(Fraction(0) if cleared else hide[i])
            if r is not None:
                rows[Action.RUN].append(r * hide[i - 1])
        else:
            for row in rows.values():
                # continuation repeats each row's own last computed value
                row.append(tail if convention == "standard" or not row else row[L - 1])
    return SurvivalTable({a: tuple(v) for a, v in rows.items()}, T1, T2, convention)


def closed_hide_row(scenario: ClosedScenario) -> np.ndarray:
    return closed_table(scenario, 1.0).row(Action.HIDE)


def closed_fight_row(scenario: ClosedScenario, p: float) -> np.ndarray:
    return closed_table(scenario, p).row(Action.FIGHT)


def closed_table(scenario: ClosedScenario, p: float | Sequence[float],
                 convention: str = "standard") -> SurvivalTable:
    """Fight/hide table for a closed arena; ``p`` may be a per-minute sequence."""
    hide = _open_hide_products(scenario.N, scenario.m, 0, scenario.T1)
    return build_table(hide, scenario.T1, scenario.T2, p, None, convention)


def open_survival_table(scenario: OpenScenario, p: float | Sequence[float], p_r: float,
                        convention: str = "standard") -> SurvivalTable:
    """Fight/hide/run table for an open arena."""
    hide = _open_hide_products(scenario.N, scenario.m, scenario.e, scenario.T1)
    return build_table(hide, scenario.T1, scenario.T2, p, p_r, convention)
