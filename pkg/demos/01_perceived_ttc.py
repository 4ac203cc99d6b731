"""
Perceived time-to-collision for two agents
==========================================

The perceived TTC of a pair is the range between them divided by the speed
at which that range shrinks. It is positive while they approach, negative
while they move apart, and the same from either agent's point of view.
"""

from perceived_ttc import KinematicState, Vec2, perceived_ttc, perceived_ttc_by_angle, relative_state

# %%
# Head-on: 10 m apart, closing at 2 + 3 m/s.
rider = KinematicState(0.0, Vec2(0, 0), Vec2(2, 0))
walker = KinematicState(0.0, Vec2(10, 0), Vec2(-3, 0))
rel = relative_state(rider, walker)
print("range", rel.range, "closing speed", rel.closing_speed)
print("head-on:", perceived_ttc(rel))

# %%
# Either agent can be the observer.
print("swapped:", perceived_ttc(relative_state(walker, rider)))

# %%
# Oblique approach. The angle form (range over |v| |cos theta|) agrees with
# the dot-product form.
mover = KinematicState(0.0, Vec2(0, 0), Vec2(1, 0))
still = KinematicState(0.0, Vec2(4, 3), Vec2(0, 0))
rel = relative_state(mover, still)
print("oblique:", perceived_ttc(rel).value, perceived_ttc_by_angle(rel).value)

# %%
# Degenerate pairs come back tagged instead of as inf or nan.
crossing = relative_state(KinematicState(0.0, Vec2(0, 0), Vec2(0, 0)),
                          KinematicState(0.0, Vec2(0, 5), Vec2(3, 0)))
same_spot = relative_state(KinematicState(0.0, Vec2(1, 1), Vec2(1, 0)),
                           KinematicState(0.0, Vec2(1, 1), Vec2(-1, 0)))
print("perpendicular:", perceived_ttc(crossing).kind.value)
print("coincident:", perceived_ttc(same_spot).kind.value)
