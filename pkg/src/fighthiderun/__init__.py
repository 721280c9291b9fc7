"""Survival probabilities and optimal actions for a civilian during an active-shooter incident."""
from __future__ import annotations

from .analytic import (Action, CaseTag, SurvivalTable, case_tag, closed_fight_row, closed_hide_row,
                       closed_table, open_survival_table)
from .complex_arena import PhaseBreakdown, breakdown, p_s, phase1_table, phase2_table
from .multi_armed import (DegeneratePool, FightOutcomeModel, effective_fight_probabilities, g, g_curve,
                          is_unimodal, multi_armed_table, peak_armed_count, proposition1_condition)
from .oracle import (EstimateReport, TrialConfig, compare, simulate_closed, simulate_complex,
                     simulate_hallway, simulate_multi_armed, simulate_open)
from .policy import (ActionPlan, HallwayAction, hallway_first_minute, hallway_survival, hide_threshold,
                     optimal_deviation, per_minute_comparison)
from .scenario import (ArmamentProfile, ClosedScenario, ComplexScenario, DegenerateScenario,
                       DivisibilityViolation, FloorRule, HallwayScenario, MultiArmedProfile, OpenScenario,
                       OrderingViolation, OutOfHorizon, RangeViolation, ScheduleViolation, Setup,
                       ValidationError, present_civilians, remaining_civilians, validate)
from .sweep import FindingFamily, SweepSpec, default_family, finding_checks, run_sweep
from .tables import table_for

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
