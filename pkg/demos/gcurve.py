"""Joint fight success as more civilians take part.

With friendly fire the curve rises and then falls, so there is a best number
of fighters below the pool size.  Without friendly fire it keeps rising.

Run: python3 demos/gcurve.py
"""
from __future__ import annotations

from fighthiderun.multi_armed import g_curve, is_unimodal, peak_armed_count, proposition1_condition

for p2, p_f, pool in [(0.45, 0.2, 20), (0.3, 0.1, 210), (0.45, 0.0, 20)]:
    curve = g_curve(p2, p_f, pool)
    peak = peak_armed_count(p2, p_f, pool)
    print(f"p2={p2} p_f={p_f} pool={pool}: condition={proposition1_condition(p2, p_f, pool)} "
          f"unimodal={is_unimodal(curve)} peak j={peak} g={curve[peak - 1]:.4f}")
    print("  " + " ".join(f"{v:.3f}" for v in curve[:12]) + (" ..." if len(curve) > 12 else ""))
