"""
Discomfort curves
=================

Reported discomfort (0 Comfortable .. 6 Collision) is regressed on the
trial's minimum perceived TTC with a line, an exponential or a power law.
The nonlinear fits are least squares in the original space.
"""

import numpy as np

from perceived_ttc import DiscomfortLevel, classify_correlation, estimate, fit

# %%
# Noisy observations around y = 33.9 exp(-6.5 x), rounded to whole levels the
# way people answer. The rounding alone moves the fitted constants.
rng = np.random.default_rng(3)
ttc = rng.uniform(0.2, 1.6, 150)
levels = np.clip(np.round(33.9 * np.exp(-6.5 * ttc) + rng.normal(0, 0.3, ttc.size)), 0, 6)

for kind in ("line", "exp", "power"):
    model = fit(list(zip(ttc, levels)), kind)
    print(f"{kind:5s} a={model.a:8.3f} b={model.b:7.3f} R2={model.r2:.3f} ({classify_correlation(model.r2).value})")

# %%
# The fitted curve turns a TTC into an expected level. Raw values can leave
# the scale near zero TTC, so a clamped value is reported alongside.
model = fit(list(zip(ttc, levels)), "exp")
for x in (0.1, 0.52, 1.24):
    raw, clamped = estimate(model, x)
    print(f"TTC {x:4.2f} s -> raw {raw:6.2f}, clamped {clamped:4.2f} ({DiscomfortLevel(round(clamped)).label})")

# %%
# Models serialize to JSON and round-trip exactly.
print(model.to_json())
