"""Independent reference implementations used by the tests.

Nothing here imports the package's numerical code, so agreement with it is
evidence rather than tautology.
"""

import math
import statistics


def box_oracle(values):
    """Sorted-rank box statistics built only on the standard library."""
    xs = sorted(values)
    n = len(xs)
    if n == 1:
        q1 = med = q3 = xs[0]
    else:
        # 'inclusive' is linear interpolation at rank (n - 1) q
        q1, med, q3 = statistics.quantiles(xs, n=4, method="inclusive")
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = [v for v in xs if lo <= v <= hi]
    half = 1.57 * iqr / math.sqrt(n)
    return {
        "median": med, "q1": q1, "q3": q3,
        "whisker_low": inside[0], "whisker_high": inside[-1],
        "notch_low": med - half, "notch_high": med + half,
        "outliers": [v for v in xs if v < lo or v > hi],
    }


def ttc_by_dot(pa, va, pb, vb):
    """Range over closing speed from plain tuples; None when undefined."""
    px, py = pb[0] - pa[0], pb[1] - pa[1]
    vx, vy = vb[0] - va[0], vb[1] - va[1]
    rng = math.hypot(px, py)
    if rng == 0:
        return None
    closing = -(px * vx + py * vy) / rng
    return None if closing == 0 else rng / closing


def offset_pass_ttc(t, speed=2.0, start_gap=10.0, offset=1.0):
    """Closed form for a mover passing a static target at a lateral offset."""
    d = start_gap - speed * t
    return (d * d + offset * offset) / (speed * d)
