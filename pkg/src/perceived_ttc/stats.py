"""Notched box-plot statistics and grouping."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .errors import EmptyInput, InvalidInput

WHISKER_REACH = 1.5
NOTCH_FACTOR = 1.57


@dataclass(frozen=True)
class BoxStats:
    n: int
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    notch_low: float
    notch_high: float
    outliers: list[float] = field(default_factory=list)

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1

    def to_dict(self) -> dict:
        return asdict(self)


def quantile(sorted_values: np.ndarray, q: float) -> float:
    """Linear interpolation at rank position ``(n - 1) * q`` of sorted data."""
    h = (sorted_values.size - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, sorted_values.size - 1)
    return float(sorted_values[lo] + (h - lo) * (sorted_values[hi] - sorted_values[lo]))


def box_stats(samples: Iterable[float]) -> BoxStats:
    """Quartiles, Tukey whiskers, outliers and median notch of ``samples``.

    Whiskers end at the most extreme observations inside the fences
    ``q1 - 1.5 IQR`` and ``q3 + 1.5 IQR``; everything beyond them is an
    outlier. The notch is ``median +/- 1.57 IQR / sqrt(n)``.
    """
    x = np.sort(np.asarray(list(samples), dtype=float))
    if x.size == 0:
        raise EmptyInput("box_stats needs at least one sample")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("box_stats samples must be finite")
    q1, med, q3 = (quantile(x, q) for q in (0.25, 0.5, 0.75))
    iqr = q3 - q1
    lo_fence = q1 - WHISKER_REACH * iqr
    hi_fence = q3 + WHISKER_REACH * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    half_notch = NOTCH_FACTOR * iqr / math.sqrt(x.size)
    return BoxStats(
        n=int(x.size),
        median=med,
        q1=q1,
        q3=q3,
        whisker_low=float(inside[0]),
        whisker_high=float(inside[-1]),
        notch_low=med - half_notch,
        notch_high=med + half_notch,
        outliers=[float(v) for v in x[(x < lo_fence) | (x > hi_fence)]],
    )


def notches_overlap(a: BoxStats, b: BoxStats) -> bool:
    """True when the two median notches intersect (no evidence of a difference)."""
    return max(a.notch_low, b.notch_low) <= min(a.notch_high, b.notch_high)


def group_by(analyses: Iterable[tuple[Hashable, float]]) -> dict[Hashable, BoxStats]:
    """Box statistics per key, keys in sorted order."""
    groups: dict[Hashable, list[float]] = {}
    for key, value in analyses:
        groups.setdefault(key, []).append(value)
    return {key: box_stats(groups[key]) for key in sorted(groups, key=str)}


def to_json(groups: Mapping[Hashable, BoxStats]) -> str:
    return json.dumps({str(k): v.to_dict() for k, v in groups.items()}, indent=2)


CSV_FIELDS = ("group", "n", "median", "q1", "q3", "whisker_low", "whisker_high", "notch_low", "notch_high", "outliers")


def to_csv(groups: Mapping[Hashable, BoxStats]) -> str:
    """One row per group; outliers joined with ``;``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for key, s in groups.items():
        w.writerow(
            [key, s.n]
            + [format(getattr(s, f), ".17g") for f in CSV_FIELDS[2:-1]]
            + [";".join(format(v, ".17g") for v in s.outliers)]
        )
    return buf.getvalue()


def from_dict(d: Mapping) -> BoxStats:
    return BoxStats(**d)
