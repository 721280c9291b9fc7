"""Pick the right analytic table for a validated setup."""
from __future__ import annotations

from .analytic import SurvivalTable, closed_table, open_survival_table
from .complex_arena import phase2_table
from .multi_armed import multi_armed_table
from .scenario import ClosedScenario, ComplexScenario, OpenScenario, Setup


def table_for(setup: Setup, armed: bool, convention: str | None = None) -> SurvivalTable:
    """Survival table of the focal civilian; complex arenas give the Phase-2 table.

    With a multi-armed profile an armed civilian's fight row uses the joint
    fight probabilities; unarmed rows are unaffected by the profile.
    """
    sc, arm = setup.scenario, setup.armament
    convention = convention or setup.convention
    if setup.multi_armed is not None:
        return multi_armed_table(sc, arm, setup.multi_armed, armed, convention)
    if isinstance(sc, ClosedScenario):
        return closed_table(sc, arm.fight(armed), convention)
    if isinstance(sc, OpenScenario):
        return open_survival_table(sc, arm.fight(armed), arm.require("p_r"), convention)
    if isinstance(sc, ComplexScenario):
        return phase2_table(sc, arm, armed, convention=convention)
    raise TypeError(f"no survival table for the {sc.arena} arena")
