"""Check every analytic table entry of a demo scenario against simulation.

Run: python3 demos/oracle_check.py [scenario.json] [trials]
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

from fighthiderun.oracle import TrialConfig, compare, reports_csv
from fighthiderun.scenario import validate

path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent / "scenarios" / "closed_small.json"
trials = int(sys.argv[2]) if len(sys.argv) > 2 else 200_000

reports = compare(validate(json.loads(path.read_text())), TrialConfig(trials, seed=2024))
print(reports_csv(reports), end="")
worst = max(abs(r.z) for r in reports)
print(f"# {len(reports)} entries, max |z| = {worst:.2f}, all within 4: {all(r.passed() for r in reports)}")
