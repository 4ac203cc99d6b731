"""
Notched box statistics
======================

Quartiles interpolate at rank (n - 1) q, whiskers reach the last points
within 1.5 IQR of the box, and the notch is median +/- 1.57 IQR / sqrt(n).
Disjoint notches suggest the medians differ.
"""

import numpy as np

from perceived_ttc import box_stats, group_by, notches_overlap
from perceived_ttc.stats import to_csv

# %%
s = box_stats([1, 2, 3, 4, 100])
print("median", s.median, "quartiles", s.q1, s.q3, "whiskers", s.whisker_low, s.whisker_high, "outliers", s.outliers)

# %%
# Two groups of minimum TTCs, one around half a second, one around 1.2 s.
rng = np.random.default_rng(0)
pairs = [("facing", v) for v in rng.normal(0.52, 0.1, 100)] + [("passing", v) for v in rng.normal(1.24, 0.1, 100)]
groups = group_by(pairs)
for name, g in groups.items():
    print(f"{name:8s} median {g.median:.3f}  notch [{g.notch_low:.3f}, {g.notch_high:.3f}]")
print("notches overlap:", notches_overlap(groups["facing"], groups["passing"]))

# %%
# Plot-ready rows for an external plotting tool.
print(to_csv(groups))
