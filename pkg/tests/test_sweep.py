from __future__ import annotations

from dataclasses import replace

from fighthiderun.analytic import Action
from fighthiderun.multi_armed import g_curve
from fighthiderun.sweep import (SweepSpec, default_family, finding_checks, run_sweep, set_path,
                                zero_friendly_fire_family)

BASE = {"arena": "closed", "N": 20, "m": 5, "T2": 2, "armament": {"p1": 0.05, "p2": 0.3}}


def test_empty_axes_single_point():
    result = run_sweep(SweepSpec.from_dict(BASE))
    assert len(result.rows) == 1
    assert result.rows[0].values["armed_action1"] is Action.HIDE


def test_set_path_copies():
    raw = set_path(BASE, "armament.p2", 0.9)
    assert raw["armament"]["p2"] == 0.9
    assert BASE["armament"]["p2"] == 0.3


def test_armed_plan_differs_on_an_up_set():
    values = [0.06, 0.2, 0.4, 0.55, 0.66, 0.67, 0.7, 0.8, 0.95, 1.0]
    spec = SweepSpec.from_dict(dict(BASE, axes=[{"name": "armament.p2", "values": values}]))
    result = run_sweep(spec)
    differs = [r.values["armed_deviation"] != r.values["unarmed_deviation"] for r in result.rows]
    first = differs.index(True)
    assert all(differs[first:]) and not any(differs[:first])


def test_invalid_points_are_skipped_not_adjusted():
    spec = SweepSpec.from_dict(dict(BASE, axes=[["m", [3, 5]], ["armament.p2", [0.01, 0.5]]]))
    result = run_sweep(spec)
    assert len(result.rows) == 4
    assert len(result.skipped) == 3
    assert any("divisibility" in s for r in result.skipped for s in r.skipped)


def test_rows_sorted_and_csv_stable():
    axes = [{"name": "armament.p2", "values": [0.9, 0.1, 0.5]}, {"name": "T2", "values": [6, 2]}]
    spec = SweepSpec.from_dict(dict(BASE, axes=axes))
    first = run_sweep(spec).to_csv()
    reordered = SweepSpec.from_dict(dict(BASE, axes=[{"name": "armament.p2", "values": [0.5, 0.9, 0.1]},
                                                    {"name": "T2", "values": [2, 6]}]))
    assert run_sweep(reordered, workers=3).to_csv() == first
    points = [tuple(line.split(",")[:2]) for line in first.splitlines()[1:]]
    assert points == sorted(points, key=lambda t: (float(t[0]), int(t[1])))


def test_gcurve_sweep_reproduces_curve():
    spec = SweepSpec.from_dict({"arena": "gcurve", "p2": 0.45, "p_f": 0.2, "N_pool": 20,
                                "axes": [{"name": "j", "values": list(range(1, 21))}]})
    result = run_sweep(spec)
    assert result.column("g") == list(g_curve(0.45, 0.2, 20))
    assert set(result.column("g_peak")) == {7}


def test_findings_pass_on_default_family():
    results = finding_checks(default_family())
    assert [r.finding for r in results] == ["i", "ii", "iii", "iv", "v", "vi"]
    assert all(r.passed for r in results), [r.line() for r in results]


def test_friendly_fire_check_fails_without_friendly_fire():
    results = {r.finding: r for r in finding_checks(zero_friendly_fire_family())}
    assert not results["vi"].passed
    assert all(r.passed for k, r in results.items() if k != "vi")


def test_endgame_family_slice_gives_unarmed_fight():
    family = default_family()
    slice_ = replace(family, closed=tuple(s for s in family.closed if (s.N, s.m, s.T2) == (20, 5, 6)))
    results = {r.finding: r for r in finding_checks(slice_)}
    assert results["ii"].passed
