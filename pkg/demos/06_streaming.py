"""
Online discomfort estimates
===========================

The stream estimator keeps each agent's latest state and, on every update,
scores the pair against every peer seen within the staleness window. The
fresher state is rolled back to the older timestamp at constant velocity.
"""

import io
import json

from perceived_ttc import CalibrationModel, Vec2
from perceived_ttc.stream import AgentUpdate, StreamEstimator, run_line_protocol

model = CalibrationModel("exp", 33.9, -6.5, r2=0.82, n=0)
est = StreamEstimator(model, threshold=2.0, staleness=0.5)

# %%
# Updates without velocity: the estimator differences consecutive positions.
for k in range(8):
    t = k * 0.1
    est.push_update(AgentUpdate("walker", t, Vec2(3.0 - 1.2 * t, 0.2)))
    for e in est.push_update(AgentUpdate("scooter", t, Vec2(3.0 * t, 0.0))):
        print(f"t={e.t:.1f}  ttc={e.ttc.value:5.2f} s  discomfort {e.discomfort_clamped:.2f}  alert {e.alert}")

# %%
# The same machinery behind the command line filter: JSON lines in, JSON lines out.
lines = [json.dumps({"agent_id": "a", "t": 0.0, "position": [0, 0], "velocity": [2, 0]}),
         json.dumps({"agent_id": "b", "t": 0.0, "position": [1.2, 0], "velocity": [-1, 0]})]
out = io.StringIO()
run_line_protocol(StreamEstimator(model, threshold=1.0), lines, out)
print(out.getvalue().strip())
