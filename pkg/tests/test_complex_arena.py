from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest

from fighthiderun.analytic import Action, open_survival_table
from fighthiderun.complex_arena import breakdown, p_s, p_s_exact, phase1_table, phase2_table
from fighthiderun.scenario import ArmamentProfile, ComplexScenario, OpenScenario

ARM = ArmamentProfile(p1=0.05, p2=0.3, p_tilde1=0.1, p_tilde2=0.45, p_r=0.2, p_r_tilde=0.3)


def scenario(**kw) -> ComplexScenario:
    base = dict(N=100, N1=80, m1=10, m2=5, e1=10, e2=5, n=2, T2=3)
    base.update(kw)
    return ComplexScenario(**base)


def p_s_by_counting(sc: ComplexScenario) -> Fraction:
    """Phase-0 massacre and n Phase-1 minutes replayed with subset counts."""
    alive = Fraction(comb(sc.N - 1, sc.N - sc.N1), comb(sc.N, sc.N - sc.N1))
    pool = sc.N1
    for _ in range(sc.n):
        exposed = pool - sc.e1
        alive *= 1 - Fraction(comb(exposed - 1, sc.m1 - 1), comb(exposed, sc.m1))
        pool -= sc.e1 + sc.m1
    return alive


def test_phase0_factor():
    assert breakdown(scenario(), ARM).phase0_survival == 0.8


def test_no_phase1_minutes():
    sc = scenario(n=0, N1=40)
    assert p_s(sc) == 0.4
    assert phase1_table(sc, ARM).horizon == 0


def test_p_s_two_minutes():
    # the victims of Phase 1 come from the N1 survivors
    assert p_s_exact(scenario()) == Fraction(8, 10) * Fraction(60, 70) * Fraction(40, 50)
    assert p_s(scenario()) == pytest.approx(0.548571, abs=1e-6)


def test_p_s_from_initial_pool_as_printed():
    assert p_s(scenario(), pool="initial") == pytest.approx(0.8 * (8 / 9) * (6 / 7), abs=1e-12)


def test_p_s_one_death_no_phase1():
    sc = ComplexScenario(N=41, N1=40, m1=10, m2=5, e1=10, e2=5, n=0, T2=3)
    assert p_s_exact(sc) == Fraction(40, 41)


@pytest.mark.parametrize("kw", [
    {}, {"n": 1, "N1": 50}, {"n": 3, "N1": 100, "N": 130}, {"N1": 60, "n": 2, "e1": 4, "m1": 6, "N": 61},
    {"N": 200, "N1": 150, "n": 5, "e1": 12, "m1": 10, "m2": 4, "e2": 6},
])
def test_p_s_matches_counting_oracle(kw):
    sc = scenario(**kw)
    assert p_s_exact(sc) == p_s_by_counting(sc)
    assert p_s(sc) <= sc.N1 / sc.N


def test_p_s_monotone_in_parameters():
    base = p_s(scenario(N=150))
    assert p_s(scenario(N=150, n=3, N1=100)) < p_s(scenario(N=150, n=2, N1=100))
    assert p_s(scenario(N=150, m1=15, N1=90)) < p_s(scenario(N=150, m1=10, N1=90))
    assert p_s(scenario(N=150, N1=90)) > base


def test_phase2_is_scaled_open_table():
    sc = scenario()
    plain = open_survival_table(OpenScenario(sc.N2, sc.m2, sc.e2, sc.T2), ARM.p2, ARM.p_r_tilde)
    scaled = phase2_table(sc, ARM, armed=True)
    for action in (Action.FIGHT, Action.HIDE, Action.RUN):
        assert scaled.exact[action] == tuple(p_s_exact(sc) * x for x in plain.exact[action])


def test_phase2_hide_row_products():
    sc = scenario(T2=6)
    t = phase2_table(sc, ARM)
    expected = p_s_exact(sc) * Fraction(30, 35) * Fraction(20, 25)
    assert t.entry(Action.HIDE, 2) == expected
    assert t.entry(Action.FIGHT, 1) == p_s_exact(sc) * Fraction(ARM.p1)
    assert t.entry(Action.HIDE, 4) == 0


def test_phase1_table_scaled_by_phase0():
    t = phase1_table(scenario(), ARM, armed=True)
    assert t.entry(Action.FIGHT, 1) == Fraction(8, 10) * Fraction(0.45)
    assert t.entry(Action.RUN, 2) == Fraction(8, 10) * Fraction(0.2) * Fraction(60, 70)
    assert t.entry(Action.HIDE, 2) == p_s_exact(scenario())


def test_breakdown_csv_has_phase_column():
    text = breakdown(scenario(), ARM).to_csv()
    lines = text.splitlines()
    assert lines[0] == "phase,minute,fight,hide,run"
    assert lines[1].startswith("0,0,")
    assert sum(line.startswith("1,") for line in lines) == 2
    assert sum(line.startswith("2,") for line in lines) == 4
