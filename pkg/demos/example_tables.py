"""Survival tables for the open-arena example and the plans they imply.

Run: python3 demos/example_tables.py
"""
from __future__ import annotations

from fighthiderun import (Action, ArmamentProfile, MultiArmedProfile, OpenScenario, multi_armed_table,
                          optimal_deviation, per_minute_comparison)
from fighthiderun.scenario import FloorRule

scenario = OpenScenario(N=210, m=15, e=25, T2=4)
armament = ArmamentProfile(p1=0.05, p2=0.3, p_r=0.1)
profiles = {
    "many armed": MultiArmedProfile(p_f=0.1, K_schedule=FloorRule(4), j_schedule=FloorRule(20)),
    "single armed": MultiArmedProfile(p_f=0.1, K_schedule=[1] * 5, j_schedule=[1] * 5),
}

for name, profile in profiles.items():
    table = multi_armed_table(scenario, armament, profile, armed=True, convention="continuation")
    print(f"== {name} ==")
    print(table.to_csv(), end="")
    plan = optimal_deviation(table)
    print("sequential plan:", plan.render().strip())
    view = per_minute_comparison(table)
    print("minute-by-minute best:", " ".join(f"{i}:{a.value}" for i, a in view))
    print()

# the hide and run rows do not depend on how many civilians are armed
a, b = (multi_armed_table(scenario, armament, p, armed=True) for p in profiles.values())
assert a.exact[Action.HIDE] == b.exact[Action.HIDE]
