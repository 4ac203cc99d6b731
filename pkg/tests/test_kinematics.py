import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from perceived_ttc.errors import InvalidInput, TimestampMismatch
from perceived_ttc.kinematics import (
    KinematicState,
    TtcKind,
    TtcValue,
    Vec2,
    perceived_ttc,
    perceived_ttc_by_angle,
    relative_state,
)


def state(p, v, t=0.0):
    return KinematicState(t, Vec2(*p), Vec2(*v))


HEAD_ON = (state((0, 0), (2, 0)), state((10, 0), (-3, 0)))
ORTHOGONAL = (state((0, 0), (0, 0)), state((0, 5), (3, 0)))
OBLIQUE = (state((0, 0), (1, 0)), state((4, 3), (0, 0)))


def test_relative_state_head_on():
    rel = relative_state(*HEAD_ON)
    assert rel.p_ij == Vec2(10, 0)
    assert rel.v_ij == Vec2(-5, 0)
    assert rel.range == 10
    assert rel.closing_speed == 5


def test_relative_state_orthogonal():
    assert relative_state(*ORTHOGONAL).closing_speed == 0


def test_relative_state_oblique():
    rel = relative_state(*OBLIQUE)
    assert rel.p_ij == Vec2(4, 3)
    assert rel.v_ij == Vec2(-1, 0)
    assert rel.range == pytest.approx(5, rel=1e-15)
    assert rel.closing_speed == pytest.approx(0.8, rel=1e-15)
    assert rel.cos_theta == pytest.approx(-0.8, rel=1e-15)


def test_timestamp_mismatch():
    with pytest.raises(TimestampMismatch):
        relative_state(state((0, 0), (0, 0), t=0.0), state((1, 0), (0, 0), t=0.01))
    # within tolerance is fine
    relative_state(state((0, 0), (0, 0), t=0.0), state((1, 0), (0, 0), t=5e-10))


@pytest.mark.parametrize(
    "pair, expected",
    [(HEAD_ON, 2.0), (OBLIQUE, 6.25)],
)
def test_ttc_examples(pair, expected):
    rel = relative_state(*pair)
    for fn in (perceived_ttc, perceived_ttc_by_angle):
        ttc = fn(rel)
        assert ttc.kind is TtcKind.FINITE
        assert ttc.value == pytest.approx(expected, rel=1e-14)


def test_orthogonal_is_no_approach():
    rel = relative_state(*ORTHOGONAL)
    assert perceived_ttc(rel).kind is TtcKind.NO_APPROACH
    assert perceived_ttc_by_angle(rel).kind is TtcKind.NO_APPROACH


def test_zero_relative_speed_is_no_approach():
    rel = relative_state(state((0, 0), (1, 1)), state((3, 4), (1, 1)))
    assert perceived_ttc(rel) == TtcValue.no_approach()
    assert perceived_ttc_by_angle(rel) == TtcValue.no_approach()


def test_coincident():
    rel = relative_state(state((1, 1), (1, 0)), state((1, 1 + 1e-8), (-1, 0)))
    assert perceived_ttc(rel).kind is TtcKind.COINCIDENT
    assert perceived_ttc_by_angle(rel).kind is TtcKind.COINCIDENT


def test_receding_is_negative():
    ttc = perceived_ttc(relative_state(state((0, 0), (-1, 0)), state((4, 0), (1, 0))))
    assert ttc.value == pytest.approx(-2.0)
    assert not ttc.is_approaching


def test_non_finite_rejected():
    with pytest.raises(InvalidInput):
        Vec2(math.nan, 0)
    with pytest.raises(InvalidInput):
        Vec2(0, math.inf)
    with pytest.raises(InvalidInput):
        KinematicState(math.inf, Vec2(0, 0), Vec2(0, 0))


# property tests

coord = st.floats(-50, 50, allow_nan=False)
speed = st.floats(-6, 6, allow_nan=False)
vec = st.tuples(coord, coord)
vel = st.tuples(speed, speed)


def non_degenerate(a, b):
    rel = relative_state(a, b)
    return rel.range > 1e-3 and abs(rel.closing_speed) > 1e-3


@given(vec, vel, vec, vel)
def test_bilateral(pa, va, pb, vb):
    a, b = state(pa, va), state(pb, vb)
    assert perceived_ttc(relative_state(a, b)) == perceived_ttc(relative_state(b, a))


@given(vec, vel, vec, vel)
def test_formulations_agree(pa, va, pb, vb):
    a, b = state(pa, va), state(pb, vb)
    assume(non_degenerate(a, b))
    rel = relative_state(a, b)
    t5, t7 = perceived_ttc(rel), perceived_ttc_by_angle(rel)
    assert t5.kind is t7.kind is TtcKind.FINITE
    assert t7.value == pytest.approx(t5.value, rel=1e-9)


@given(vec, vel, vec, vel)
def test_sign_matches_closing_speed(pa, va, pb, vb):
    a, b = state(pa, va), state(pb, vb)
    rel = relative_state(a, b)
    ttc = perceived_ttc(rel)
    if ttc.is_finite:
        assert (ttc.value > 0) == (rel.closing_speed > 0)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-6, 6), st.floats(-6, 6),
       st.floats(0, 2 * math.pi))
def test_collinear_reduces_to_gap_over_speed(xa, xb, ua, ub, angle):
    assume(abs(xb - xa) > 1e-3 and abs(ua - ub) > 1e-3)
    d = (math.cos(angle), math.sin(angle))
    a = state((xa * d[0], xa * d[1]), (ua * d[0], ua * d[1]))
    b = state((xb * d[0], xb * d[1]), (ub * d[0], ub * d[1]))
    gap = abs(xb - xa)
    closing = (ua - ub) * math.copysign(1.0, xb - xa)
    ttc = perceived_ttc(relative_state(a, b))
    assert ttc.value == pytest.approx(gap / closing, rel=1e-12, abs=1e-12)


@given(vec, vel, vec, vel, vel)
def test_galilean_invariance(pa, va, pb, vb, common):
    a, b = state(pa, va), state(pb, vb)
    assume(non_degenerate(a, b))
    c = Vec2(*common)
    a2 = KinematicState(0.0, a.position, a.velocity + c)
    b2 = KinematicState(0.0, b.position, b.velocity + c)
    assert perceived_ttc(relative_state(a2, b2)).value == pytest.approx(
        perceived_ttc(relative_state(a, b)).value, rel=1e-12
    )


@given(vec, vel, vec, vel, st.floats(0, 2 * math.pi), vec)
def test_rigid_motion_invariance(pa, va, pb, vb, angle, shift):
    a, b = state(pa, va), state(pb, vb)
    assume(non_degenerate(a, b))
    c, s = math.cos(angle), math.sin(angle)

    def move(k):
        p, v = k.position, k.velocity
        return state((c * p.x - s * p.y + shift[0], s * p.x + c * p.y + shift[1]),
                     (c * v.x - s * v.y, s * v.x + c * v.y))

    assert perceived_ttc(relative_state(move(a), move(b))).value == pytest.approx(
        perceived_ttc(relative_state(a, b)).value, rel=1e-12
    )


@given(vec, vel, vec, vel, st.floats(0.01, 100))
def test_scaling(pa, va, pb, vb, s):
    a, b = state(pa, va), state(pb, vb)
    assume(non_degenerate(a, b))
    t0 = perceived_ttc(relative_state(a, b)).value
    both = perceived_ttc(relative_state(
        state(np.multiply(pa, s), np.multiply(va, s)), state(np.multiply(pb, s), np.multiply(vb, s))
    )).value
    positions = perceived_ttc(relative_state(state(np.multiply(pa, s), va), state(np.multiply(pb, s), vb))).value
    assert both == pytest.approx(t0, rel=1e-12)
    assert positions == pytest.approx(s * t0, rel=1e-12)


@settings(max_examples=50)
@given(st.floats(1, 40), st.floats(0.2, 8), st.floats(0, 1))
def test_countdown(gap, closing, frac):
    t = frac * gap / closing * 0.99
    a = state((closing * 0.25 * t, 0), (closing * 0.25, 0), t=t)
    b = state((gap - closing * 0.75 * t, 0), (-closing * 0.75, 0), t=t)
    t0 = gap / closing
    assert perceived_ttc(relative_state(a, b)).value == pytest.approx(t0 - t, abs=1e-9)


def test_equivalence_bulk():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(2000):
        pa, pb = rng.uniform(-20, 20, (2, 2))
        va, vb = rng.uniform(-5, 5, (2, 2))
        a, b = state(pa, va), state(pb, vb)
        if not non_degenerate(a, b):
            continue
        rel = relative_state(a, b)
        assert perceived_ttc_by_angle(rel).value == pytest.approx(perceived_ttc(rel).value, rel=1e-9)
        checked += 1
    assert checked > 1900
