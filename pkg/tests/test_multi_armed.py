from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fighthiderun.analytic import Action, open_survival_table
from fighthiderun.multi_armed import (DegeneratePool, FightOutcomeModel, effective_fight_probabilities, g,
                                      g_curve, g_curve_csv, g_exact, is_unimodal, local_maxima,
                                      multi_armed_table, peak_armed_count, proposition1_condition)
from fighthiderun.scenario import (ArmamentProfile, ClosedScenario, ComplexScenario, MultiArmedProfile,
                                   OpenScenario)

from oracles import exact_joint_fight

EXAMPLE = OpenScenario(210, 15, 25, 4)
ARM = ArmamentProfile(p1=0.05, p2=0.3, p_r=0.1)
PROFILE = MultiArmedProfile(p_f=0.1)


@pytest.mark.parametrize("p2, p_f, j, pool", [(0.45, 0.2, 1, 20), (0.45, 0.2, 3, 20), (0.3, 0.1, 4, 9),
                                              (0.9, 0.5, 2, 2), (0.2, 0.19, 5, 6)])
def test_g_matches_enumeration(p2, p_f, j, pool):
    assert g_exact(p2, p_f, j, pool) == exact_joint_fight(p2, p_f, j, pool)
    assert g(p2, p_f, j, pool) == pytest.approx(float(exact_joint_fight(p2, p_f, j, pool)), abs=1e-14)


def test_g_single_fighter_is_p2():
    assert g(0.37, 0.2, 1, 50) == 0.37


def test_g_degenerate_pool():
    with pytest.raises(DegeneratePool):
        g(0.4, 0.1, 2, 1)
    with pytest.raises(DegeneratePool):
        proposition1_condition(0.4, 0.1, 1)


def test_fight_outcome_model_checks_ranges():
    assert FightOutcomeModel(0.45, 0.2, 7, 20).g == g(0.45, 0.2, 7, 20)
    with pytest.raises(ValueError):
        FightOutcomeModel(0.45, 0.2, 21, 20)


@settings(max_examples=200, deadline=None)
@given(p2=st.floats(0.01, 1.0), c=st.floats(0.0, 0.99), j=st.integers(1, 60), pool=st.integers(2, 300))
def test_g_is_a_probability(p2, c, j, pool):
    value = g(p2, c * p2, min(j, pool), pool)
    assert 0 < value <= 1


def test_unimodal_curve_with_friendly_fire():
    assert proposition1_condition(0.45, 0.2, 20)
    curve = g_curve(0.45, 0.2, 20)
    assert is_unimodal(curve)
    assert local_maxima(curve) == [6]
    assert peak_armed_count(0.45, 0.2, 20) == 7


def test_peak_near_certain_success():
    assert peak_armed_count(0.999999, 0.1, 20) == 1


def test_no_friendly_fire_keeps_rising():
    curve = g_curve(0.45, 0.0, 20)
    assert np.all(np.diff(curve) >= 0)
    assert peak_armed_count(0.45, 0.0, 20) == 20


@settings(max_examples=150, deadline=None)
@given(p2=st.floats(0.05, 0.95), c=st.floats(0.05, 0.95), pool=st.integers(3, 80))
def test_condition_implies_unimodal_scan(p2, c, pool):
    if proposition1_condition(p2, c * p2, pool):
        curve = [float(g_exact(p2, c * p2, j, pool)) for j in range(1, pool + 1)]
        assert len(local_maxima(curve)) == 1


def test_g_curve_csv():
    lines = g_curve_csv(0.45, 0.2, 20).splitlines()
    assert lines[0] == "j,g"
    assert lines[1] == "1,0.450000"
    assert len(lines) == 21


def test_effective_probabilities_example():
    p = effective_fight_probabilities(EXAMPLE, ARM, PROFILE, armed=True)
    assert round(p[0], 3) == 0.968
    assert effective_fight_probabilities(EXAMPLE, ARM, PROFILE, armed=False) == [0.05] * 5


def test_example_table_rows():
    t = multi_armed_table(EXAMPLE, ARM, PROFILE, convention="continuation")
    np.testing.assert_allclose(t.row(Action.FIGHT)[:5], [0.968, 0.863, 0.724, 0.534, 0.276], atol=1e-3)
    np.testing.assert_allclose(t.row(Action.HIDE)[:5], [0.919, 0.824, 0.706, 0.543, 0.217], atol=1e-3)
    np.testing.assert_allclose(t.row(Action.RUN)[:5], [0.100, 0.092, 0.083, 0.071, 0.054], atol=1e-3)


def test_single_fighter_schedule_reduces_to_plain_table():
    single = MultiArmedProfile(p_f=0.1, K_schedule=[1] * 5, j_schedule=[1] * 5)
    multi = multi_armed_table(EXAMPLE, ARM, single)
    plain = open_survival_table(EXAMPLE, ARM.p2, ARM.p_r)
    assert multi.exact == plain.exact


def test_unarmed_row_is_p1_times_previous_hide():
    t = multi_armed_table(EXAMPLE, ARM, PROFILE, armed=False)
    hide = (Fraction(1),) + t.exact[Action.HIDE]
    for i in range(1, 5):
        assert t.entry(Action.FIGHT, i) == Fraction(0.05) * hide[i - 1]


def test_hide_and_run_rows_unchanged():
    multi = multi_armed_table(EXAMPLE, ARM, PROFILE)
    plain = open_survival_table(EXAMPLE, ARM.p2, ARM.p_r)
    assert multi.exact[Action.HIDE] == plain.exact[Action.HIDE]
    assert multi.exact[Action.RUN] == plain.exact[Action.RUN]


def test_many_armed_dominates_single_armed():
    multi = multi_armed_table(EXAMPLE, ARM, PROFILE).row(Action.FIGHT)
    single = open_survival_table(EXAMPLE, ARM.p2, ARM.p_r).row(Action.FIGHT)
    assert np.all(multi[:4] >= single[:4])


def test_closed_arena_uses_closed_pools():
    sc = ClosedScenario(80, 10, 3)
    p = effective_fight_probabilities(sc, ARM, PROFILE, armed=True)
    assert p[1] == g(0.3, 0.1, 3, 70)


def test_complex_arena_uses_tilde_probabilities():
    sc = ComplexScenario(N=300, N1=250, m1=20, m2=10, e1=15, e2=10, n=2, T2=3)
    arm = ArmamentProfile(p1=0.05, p2=0.3, p_tilde1=0.1, p_tilde2=0.45, p_r=0.2, p_r_tilde=0.3)
    profile = MultiArmedProfile(p_f=0.1, p_f_tilde=0.2)
    p = effective_fight_probabilities(sc, arm, profile, armed=True)
    assert p[0] == g(0.45, 0.2, sc.N2 // 20, sc.N2)
