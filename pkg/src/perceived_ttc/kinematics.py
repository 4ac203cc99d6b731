"""Relative kinematics and perceived time-to-collision for one pair of agents.

Agents are point masses in the plane. For agents ``i`` and ``j`` the relative
position is ``p_ij = p_j - p_i`` and the relative velocity ``v_ij = v_j - v_i``.
The perceived TTC is the inter-agent range divided by the closing speed along
the line of sight::

    T_p = |p_ij| / closing_speed,   closing_speed = -(p_ij . v_ij) / |p_ij|

so ``T_p > 0`` while the agents approach each other and ``T_p < 0`` while
they recede. The value is symmetric in the two agents.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidInput, TimestampMismatch

#: Ranges below this (m) are treated as coincident agents.
EPS_RANGE = 1e-6
#: Closing speeds (or relative speeds) below this (m/s) count as no approach.
EPS_SPEED = 1e-9
#: Two states are simultaneous when their timestamps differ by at most this (s).
EPS_TIME = 1e-9


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidInput(f"non-finite value {v!r}")


@dataclass(frozen=True, slots=True)
class Vec2:
    """Planar vector in meters (position) or meters/second (velocity)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        _check_finite(self.x, self.y)

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y)

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True, slots=True)
class KinematicState:
    """Timestamped position and velocity of one agent."""

    t: float
    position: Vec2
    velocity: Vec2

    def __post_init__(self) -> None:
        _check_finite(self.t)


@dataclass(frozen=True, slots=True)
class RelativeState:
    p_ij: Vec2
    v_ij: Vec2
    range: float
    closing_speed: float
    cos_theta: float


class TtcKind(str, enum.Enum):
    FINITE = "finite"
    NO_APPROACH = "no_approach"
    COINCIDENT = "coincident"


@dataclass(frozen=True, slots=True)
class TtcValue:
    """Perceived TTC, tagged so degenerate cases never surface as inf/NaN.

    ``value`` is set (seconds, positive while approaching) only when ``kind``
    is :attr:`TtcKind.FINITE`.
    """

    kind: TtcKind
    value: float | None = None

    @classmethod
    def finite(cls, value: float) -> TtcValue:
        _check_finite(value)
        return cls(TtcKind.FINITE, float(value))

    @classmethod
    def no_approach(cls) -> TtcValue:
        return cls(TtcKind.NO_APPROACH)

    @classmethod
    def coincident(cls) -> TtcValue:
        return cls(TtcKind.COINCIDENT)

    @property
    def is_finite(self) -> bool:
        return self.kind is TtcKind.FINITE

    @property
    def is_approaching(self) -> bool:
        """True for a finite, strictly positive value."""
        return self.kind is TtcKind.FINITE and self.value > 0.0

    def __str__(self) -> str:
        if self.is_finite:
            return f"{self.value:.6g} s"
        return self.kind.value


def relative_state(a: KinematicState, b: KinematicState) -> RelativeState:
    """Kinematics of ``b`` relative to ``a`` at their common timestamp.

    Raises
    ------
    TimestampMismatch
        If the two states are more than 1e-9 s apart.
    """
    if abs(a.t - b.t) > EPS_TIME:
        raise TimestampMismatch(f"states at t={a.t!r} and t={b.t!r} are not simultaneous")
    p = b.position - a.position
    v = b.velocity - a.velocity
    rng = p.norm()
    pv = p.dot(v)
    speed = v.norm()
    if rng > 0.0:
        closing = -pv / rng
    else:
        closing = 0.0
    if rng > 0.0 and speed > 0.0:
        cos_theta = min(1.0, max(-1.0, pv / (rng * speed)))
    else:
        cos_theta = 0.0
    return RelativeState(p_ij=p, v_ij=v, range=rng, closing_speed=closing, cos_theta=cos_theta)


def perceived_ttc(rel: RelativeState) -> TtcValue:
    """Range over line-of-sight closing speed, positive on approach."""
    if rel.range < EPS_RANGE:
        return TtcValue.coincident()
    if abs(rel.closing_speed) < EPS_SPEED:
        return TtcValue.no_approach()
    return TtcValue.finite(rel.range / rel.closing_speed)


def perceived_ttc_by_angle(rel: RelativeState) -> TtcValue:
    """Same quantity written as ``range / (|v_ij| |cos theta|)``.

    The sign is taken from the approach test rather than from ``cos theta``
    so approaching agents give a positive value.
    """
    if rel.range < EPS_RANGE:
        return TtcValue.coincident()
    speed = rel.v_ij.norm()
    if speed < EPS_SPEED or abs(rel.closing_speed) < EPS_SPEED:
        return TtcValue.no_approach()
    # recompute the angle unclamped so this path does not inherit rounding
    # from the clamp in relative_state
    cos_theta = rel.p_ij.dot(rel.v_ij) / (rel.range * speed)
    magnitude = rel.range / (speed * abs(cos_theta))
    return TtcValue.finite(magnitude if rel.closing_speed > 0.0 else -magnitude)


def pair_ttc(a: KinematicState, b: KinematicState) -> TtcValue:
    """Shorthand for ``perceived_ttc(relative_state(a, b))``."""
    return perceived_ttc(relative_state(a, b))
