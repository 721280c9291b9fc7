"""Collects one verdict line per acceptance criterion for the terminal summary."""
from __future__ import annotations

LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}"
    LINES.append(line)
    print(line)
    return passed
