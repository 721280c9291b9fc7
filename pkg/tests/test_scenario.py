from __future__ import annotations

import warnings

import pytest

from fighthiderun.scenario import (ArmamentProfile, ClosedScenario, ComplexScenario, DivisibilityViolation,
                                   FloorRule, HallwayScenario, MultiArmedProfile, OpenScenario,
                                   OrderingViolation, OutOfHorizon, RangeViolation, ScheduleViolation,
                                   ScheduleWarning, Setup, ValidationError, present_civilians,
                                   remaining_civilians, validate)

EXAMPLE = {
    "arena": "open", "N": 210, "m": 15, "e": 25, "T2": 4,
    "armament": {"p1": 0.05, "p2": 0.3, "p_r": 0.1},
    "multi_armed": {"p_f": 0.1, "K_schedule": "floor:4", "j_schedule": "floor:20"},
}


def kinds(exc: ValidationError) -> set[type]:
    return {type(e) for e in exc.errors}


def test_closed_valid_derives_T1():
    assert ClosedScenario(20, 5, 2).T1 == 4


def test_closed_not_divisible():
    with pytest.raises(ValidationError) as info:
        ClosedScenario(10, 3, 2)
    assert kinds(info.value) == {DivisibilityViolation}


def test_open_example_is_valid_with_leftover():
    sc = OpenScenario(210, 15, 25, 4)
    assert sc.T1 == 5
    assert sc.leftover == 10


def test_open_exit_rate_bound():
    with pytest.raises(ValidationError):
        OpenScenario(20, 5, 15, 2)


def test_complex_derives_N2_and_T1():
    sc = ComplexScenario(N=100, N1=80, m1=10, m2=5, e1=10, e2=5, n=2, T2=3)
    assert sc.N2 == 40
    assert sc.T1 == 4


def test_complex_ordering_and_divisibility_all_reported():
    with pytest.raises(ValidationError) as info:
        ComplexScenario(N=100, N1=80, m1=5, m2=5, e1=10, e2=4, n=2, T2=3)
    found = kinds(info.value)
    assert OrderingViolation in found
    assert DivisibilityViolation in found


def test_armament_ordering_and_range():
    with pytest.raises(ValidationError) as info:
        ArmamentProfile(p1=0.5, p2=0.4, p_r=1.5)
    assert kinds(info.value) == {OrderingViolation, RangeViolation}


def test_hallway_capacity():
    with pytest.raises(ValidationError):
        HallwayScenario(M=8, K=2, N=4, m=2, T2=6)
    assert HallwayScenario(M=9, K=2, N=4, m=2, T2=6).T1 == 2


def test_validate_collects_every_violation():
    raw = {"arena": "closed", "N": 10, "m": 3, "T2": 0, "armament": {"p1": 0.6, "p2": 0.4}}
    with pytest.raises(ValidationError) as info:
        validate(raw)
    assert len(info.value.errors) >= 3
    assert {DivisibilityViolation, OrderingViolation, RangeViolation} <= kinds(info.value)


def test_validate_keeps_optional_armament_fields():
    setup = validate(EXAMPLE)
    assert setup.armament.p_r == 0.1
    assert isinstance(setup.multi_armed.j_schedule, FloorRule)


def test_validate_is_idempotent():
    setup = validate(EXAMPLE)
    assert validate(setup) is setup
    assert validate(setup.to_dict()) == setup


def test_round_trip_explicit_schedules():
    raw = dict(EXAMPLE, multi_armed={"p_f": 0.1, "K_schedule": [52, 42, 32, 22, 12],
                                     "j_schedule": [10, 8, 6, 4, 2]})
    setup = validate(raw)
    assert validate(setup.to_dict()) == setup


def test_unknown_arena_and_fields():
    with pytest.raises(ValidationError):
        validate({"arena": "stadium"})
    with pytest.raises(ValidationError):
        validate({"arena": "closed", "N": 20, "m": 5, "T2": 2, "Q": 1, "armament": {"p1": 0.1, "p2": 0.2}})


def test_schedule_must_not_increase():
    raw = dict(EXAMPLE, multi_armed={"p_f": 0.1, "K_schedule": [52, 42, 32, 22, 12],
                                     "j_schedule": [2, 4, 4, 4, 2]})
    with pytest.raises(ValidationError) as info:
        validate(raw)
    assert ScheduleViolation in kinds(info.value)


def test_schedule_fast_armed_losses_warn():
    profile = MultiArmedProfile(p_f=0.1, K_schedule=[40, 10], j_schedule=[2, 1])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        profile.schedules([200, 160], m=15)
    assert any(issubclass(w.category, ScheduleWarning) for w in caught)


def test_friendly_fire_must_be_below_fight_success():
    raw = dict(EXAMPLE, multi_armed={"p_f": 0.4})
    with pytest.raises(ValidationError):
        validate(raw)


def test_floor_rule_clamps_to_one():
    assert FloorRule(20)(5, 10) == 1
    assert FloorRule(4)(1, 210) == 52


@pytest.mark.parametrize("scenario, minute, expected", [
    (ClosedScenario(20, 5, 2), 3, 10),
    (OpenScenario(210, 15, 25, 4), 1, 185),
    (ComplexScenario(N=100, N1=80, m1=10, m2=5, e1=10, e2=5, n=2, T2=3), 2, 25),
])
def test_remaining_civilians(scenario, minute, expected):
    assert remaining_civilians(scenario, minute) == expected


def test_remaining_civilians_constant_decrement():
    sc = OpenScenario(200, 15, 25, 4)
    pools = [remaining_civilians(sc, i) for i in range(1, sc.T1 + 1)]
    assert {a - b for a, b in zip(pools, pools[1:])} == {40}
    assert pools[-1] + 25 == 40  # the last minute's present pool is exactly e + m


def test_present_pool_at_last_minute():
    assert present_civilians(ClosedScenario(20, 5, 9), 4) == 5
    assert present_civilians(OpenScenario(200, 15, 25, 9), 5) == 40


def test_out_of_horizon():
    with pytest.raises(OutOfHorizon):
        remaining_civilians(ClosedScenario(20, 5, 2), 5)
    with pytest.raises(OutOfHorizon):
        remaining_civilians(ClosedScenario(20, 5, 2), 0)


def test_setup_is_hashable_and_frozen():
    setup = validate(EXAMPLE)
    assert isinstance(setup, Setup)
    with pytest.raises(Exception):
        setup.scenario.N = 5
