"""Several armed civilians fighting together, with friendly fire."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .analytic import SurvivalTable, closed_table, open_survival_table
from .complex_arena import phase2_table
from .scenario import (ArmamentProfile, ClosedScenario, ComplexScenario, MultiArmedProfile,
                       OpenScenario, Scenario, present_civilians)


class DegeneratePool(ValueError):
    pass


def g(p2: float, p_f: float, j: int, N_pool: int) -> float:
    """Probability that a fighter survives a fight joined by ``j - 1`` others.

    The shooter dies if any of the ``j`` fighters hits him, and each of the
    other ``j - 1`` fighters independently kills the focal civilian with
    probability ``p_f / (N_pool - 1)``.
    """
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    if j == 1:
        return float(p2)
    if N_pool <= 1:
        raise DegeneratePool(f"j={j} fighters need at least 2 civilians, pool has {N_pool}")
    return (1.0 - (1.0 - p2) ** j) * (1.0 - p_f / (N_pool - 1)) ** (j - 1)


def g_exact(p2: float, p_f: float, j: int, N_pool: int) -> Fraction:
    """:func:`g` evaluated exactly on the binary values of ``p2`` and ``p_f``."""
    if j == 1:
        return Fraction(p2)
    if N_pool <= 1:
        raise DegeneratePool(f"j={j} fighters need at least 2 civilians, pool has {N_pool}")
    q = 1 - Fraction(p_f) / (N_pool - 1)
    return (1 - (1 - Fraction(p2)) ** j) * q ** (j - 1)


@dataclass(frozen=True)
class FightOutcomeModel:
    p2: float
    p_f: float
    j: int
    N_pool: int

    def __post_init__(self) -> None:
        if not 1 <= self.j <= self.N_pool:
            raise ValueError(f"need 1 <= j <= N_pool, got j={self.j}, N_pool={self.N_pool}")
        if not 0 <= self.p_f < self.p2 <= 1:
            raise ValueError(f"need 0 <= p_f < p2 <= 1, got p_f={self.p_f}, p2={self.p2}")

    @property
    def g(self) -> float:
        return g(self.p2, self.p_f, self.j, self.N_pool)


def proposition1_condition(p2: float, p_f: float, N_pool: int) -> bool:
    """Sufficient condition for ``g`` to rise and then fall in ``j``."""
    if N_pool < 2:
        raise DegeneratePool(f"condition needs N_pool >= 2, got {N_pool}")
    q = 1.0 - p_f / (N_pool - 1)
    return q / (q * (1.0 - p2)) ** ((1.0 - p2) ** 2) > 1.0


def g_curve(p2: float, p_f: float, N_pool: int) -> np.ndarray:
    """``g`` for ``j = 1..N_pool``."""
    return np.array([g(p2, p_f, j, N_pool) for j in range(1, N_pool + 1)])


def g_curve_csv(p2: float, p_f: float, N_pool: int) -> str:
    rows = ["j,g"] + [f"{j},{v:.6f}" for j, v in enumerate(g_curve(p2, p_f, N_pool), 1)]
    return "\n".join(rows) + "\n"


def peak_armed_count(p2: float, p_f: float, N_pool: int) -> int:
    """Number of fighters maximising ``g``; ties go to the smaller count."""
    if N_pool < 2:
        raise DegeneratePool(f"scan needs N_pool >= 2, got {N_pool}")
    best_j, best = 1, Fraction(p2)
    miss, q = 1 - Fraction(p2), 1 - Fraction(p_f) / (N_pool - 1)
    miss_j, q_j = miss, Fraction(1)
    for j in range(2, N_pool + 1):
        miss_j *= miss
        q_j *= q
        value = (1 - miss_j) * q_j
        if value > best:
            best_j, best = j, value
    return best_j


def local_maxima(values: Sequence[float]) -> list[int]:
    """0-based indices strictly above both neighbours (one neighbour at the ends)."""
    n = len(values)
    return [i for i in range(n)
            if (i == 0 or values[i] > values[i - 1]) and (i == n - 1 or values[i] > values[i + 1])]


def is_unimodal(values: Sequence[float]) -> bool:
    """Exactly one local maximum and no rise after the first fall."""
    diffs = np.diff(np.asarray(values, dtype=float))
    falls = np.flatnonzero(diffs < 0)
    if falls.size and np.any(diffs[falls[0]:] > 0):
        return False
    return len(local_maxima(values)) == 1


def fight_pools(scenario: Scenario) -> list[int]:
    """Civilians present at the start of each minute ``1..T1``."""
    return [present_civilians(scenario, i) for i in range(1, scenario.T1 + 1)]


def effective_fight_probabilities(scenario: Scenario, armament: ArmamentProfile,
                                  profile: MultiArmedProfile, armed: bool) -> list[float]:
    """Per-minute fight success ``p_2i`` for minutes ``1..T1``.

    Complex arenas use the Phase-2 tilde probabilities and pools
    ``N2 - (i-1)(e2+m2)``.
    """
    pools = fight_pools(scenario)
    if isinstance(scenario, ComplexScenario):
        p_arm, p_unarmed = armament.require("p_tilde2"), armament.require("p_tilde1")
        p_f = profile.p_f_tilde if profile.p_f_tilde is not None else profile.p_f
        m = scenario.m2
    else:
        p_arm, p_unarmed, p_f, m = armament.p2, armament.p1, profile.p_f, scenario.m
    if not armed:
        return [p_unarmed] * len(pools)
    _, j = profile.schedules(pools, m)
    return [g(p_arm, p_f, jj, pool) for jj, pool in zip(j, pools)]


def multi_armed_table(scenario: Scenario, armament: ArmamentProfile, profile: MultiArmedProfile,
                      armed: bool = True, convention: str = "standard") -> SurvivalTable:
    """Single-civilian table of the arena with fight success replaced by ``p_2i``."""
    p = effective_fight_probabilities(scenario, armament, profile, armed)
    if isinstance(scenario, ClosedScenario):
        return closed_table(scenario, p, convention)
    if isinstance(scenario, OpenScenario):
        return open_survival_table(scenario, p, armament.require("p_r"), convention)
    if isinstance(scenario, ComplexScenario):
        return phase2_table(scenario, armament, armed, fight=p, convention=convention)
    raise TypeError(f"no multi-armed table for {type(scenario).__name__}")
