"""
From trajectories to one number per trial
=========================================

A trial is two timed trajectories. Velocities come from central differences,
the pair is put on one timeline, the pass is the moment of closest approach,
and the trial's score is the smallest positive perceived TTC before it.
"""

import numpy as np

from perceived_ttc import Trajectory, TrialRecord, analyze_trial, detect_pass, estimate_velocities, ttc_series

# %%
# A mover at 2 m/s passes a standing person 1 m to the side, sampled at 120 Hz.
t = np.arange(961) / 120
mover = Trajectory("mover", t, np.column_stack([2 * t, np.zeros_like(t)]))
person = Trajectory("person", t, np.tile([10.0, 1.0], (t.size, 1)))

series = ttc_series(mover, person)
print("pass at", detect_pass(series), "s")

# %%
# Before the pass the TTC is (d^2 + 1) / (2 d) with d the remaining gap, which
# bottoms out at 1 s when d = 1 m, half a second before the pass.
result = analyze_trial(TrialRecord("demo", "passing", mover, person))
print(f"min perceived TTC {result.min_ttc:.4f} s at t = {result.min_ttc_time:.4f} s")

# %%
# Noisy positions: a centered moving average over the velocity estimates
# (window in seconds) keeps the differences from amplifying the noise.
rng = np.random.default_rng(0)
noisy = Trajectory("mover", t, mover.xy + rng.normal(0, 0.005, mover.xy.shape))
for window in (0.0, 0.25):
    v = np.array([s.velocity.x for s in estimate_velocities(noisy, window)])
    print(f"window {window:.2f} s: velocity rms error {np.sqrt(np.mean((v - 2) ** 2)):.3f} m/s")
print("smoothed trial:", round(analyze_trial(TrialRecord("n", "passing", noisy, person), 0.25).min_ttc, 3), "s")
