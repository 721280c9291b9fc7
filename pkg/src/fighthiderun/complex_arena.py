"""Three-phase complex arena.

Phase 0 kills ``N - N1`` civilians before anyone reacts, Phase 1 runs the
open-arena dynamics with rates ``(m1, e1)`` for ``n`` minutes, and Phase 2
runs them with ``(m2, e2)`` on the ``N2 = N1 - n(e1 + m1)`` civilians left.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .analytic import Action, SurvivalTable, build_table, exposed_pools, hide_products
from .scenario import ArmamentProfile, ComplexScenario

POOLS = ("arena", "initial")


def phase1_pools(scenario: ComplexScenario, pool: str = "arena") -> list[int]:
    """Victim pools of the Phase-1 minutes.

    ``pool="arena"`` starts from the ``N1`` Phase-0 survivors, which is what
    the generative model produces.  ``pool="initial"`` starts from ``N`` as
    the closed-form survival expression is printed; it is kept only to
    document the difference.
    """
    if pool not in POOLS:
        raise ValueError(f"pool must be one of {POOLS}")
    start = scenario.N1 if pool == "arena" else scenario.N
    return exposed_pools(start, scenario.m1, scenario.e1, scenario.n)


def phase0_survival(scenario: ComplexScenario) -> Fraction:
    return Fraction(scenario.N1, scenario.N)


def p_s_exact(scenario: ComplexScenario, pool: str = "arena") -> Fraction:
    return phase0_survival(scenario) * hide_products(phase1_pools(scenario, pool), scenario.m1)[-1]


def p_s(scenario: ComplexScenario, pool: str = "arena") -> float:
    """Probability of being alive and still in the arena when Phase 2 starts."""
    return float(p_s_exact(scenario, pool))


def phase1_table(scenario: ComplexScenario, armament: ArmamentProfile, armed: bool = False,
                 fight: float | Sequence[float] | None = None) -> SurvivalTable:
    """Phase-1 fight/hide/run table over ``n`` minutes, scaled by ``N1/N``."""
    hide = hide_products(phase1_pools(scenario), scenario.m1)
    p = armament.fight_tilde(armed) if fight is None else fight
    fight_p = [Fraction(x) for x in ([p] * scenario.n if isinstance(p, (int, float)) else p)]
    run_p = Fraction(armament.require("p_r"))
    scale = phase0_survival(scenario)
    rows = {
        Action.FIGHT: tuple(scale * fight_p[i - 1] * hide[i - 1] for i in range(1, scenario.n + 1)),
        Action.HIDE: tuple(scale * h for h in hide[1:]),
        Action.RUN: tuple(scale * run_p * hide[i - 1] for i in range(1, scenario.n + 1)),
    }
    return SurvivalTable(rows)


def phase2_table(scenario: ComplexScenario, armament: ArmamentProfile, armed: bool = False,
                 fight: float | Sequence[float] | None = None,
                 convention: str = "standard") -> SurvivalTable:
    """Phase-2 table: ``p_s`` times the open-arena table on ``(N2, m2, e2)``.

    Fighting uses the Phase-2 success probabilities ``p1``/``p2`` and running
    uses ``p_r_tilde``.
    """
    hide = hide_products(exposed_pools(scenario.N2, scenario.m2, scenario.e2, scenario.T1), scenario.m2)
    p = armament.fight(armed) if fight is None else fight
    base = build_table(hide, scenario.T1, scenario.T2, p, armament.require("p_r_tilde"), convention)
    return base.scaled(p_s_exact(scenario))


@dataclass(frozen=True)
class PhaseBreakdown:
    phase0_survival: float
    phase1_table: SurvivalTable
    p_s: float
    phase2_table: SurvivalTable

    def to_csv(self) -> str:
        lines = ["phase,minute,fight,hide,run", f"0,0,,{self.phase0_survival:.6f},"]
        for phase, table in ((1, self.phase1_table), (2, self.phase2_table)):
            for i in range(1, table.horizon + 1):
                cells = [f"{table[a, i]:.6f}" for a in (Action.FIGHT, Action.HIDE, Action.RUN)]
                lines.append(f"{phase},{i}," + ",".join(cells))
        return "\n".join(lines) + "\n"


def breakdown(scenario: ComplexScenario, armament: ArmamentProfile, armed: bool = False,
              convention: str = "standard") -> PhaseBreakdown:
    return PhaseBreakdown(
        phase0_survival=float(phase0_survival(scenario)),
        phase1_table=phase1_table(scenario, armament, armed),
        p_s=p_s(scenario),
        phase2_table=phase2_table(scenario, armament, armed, convention=convention),
    )
