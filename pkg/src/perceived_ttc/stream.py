"""Online discomfort estimation from incremental agent updates.

:class:`StreamEstimator` keeps the latest state of every agent. Each update
is paired with every other agent whose latest state is at most
``staleness`` seconds away; the fresher of the two states is moved back to
the older timestamp assuming constant velocity, and one
:class:`ComfortEvent` is emitted for the pair.

Discomfort for a tagged TTC: receding agents and ``no_approach`` read as 0,
coincident agents as the top of the scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

from .calibration import MAX_LEVEL, CalibrationModel, estimate
from .errors import FormatError, InvalidInput, OutOfRange, TimeRegression
from .kinematics import EPS_TIME, KinematicState, TtcKind, TtcValue, Vec2, pair_ttc

DEFAULT_STALENESS = 0.5  # s


@dataclass(frozen=True)
class AgentUpdate:
    agent_id: str
    t: float
    position: Vec2
    velocity: Vec2 | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.t):
            raise InvalidInput(f"update time must be finite, got {self.t!r}")

    @classmethod
    def from_dict(cls, d: Mapping) -> AgentUpdate:
        try:
            vel = d.get("velocity")
            return cls(
                agent_id=str(d["agent_id"]),
                t=float(d["t"]),
                position=_vec(d["position"]),
                velocity=None if vel is None else _vec(vel),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad agent update {dict(d)!r}: {exc}") from exc


def _vec(v) -> Vec2:
    if isinstance(v, Mapping):
        return Vec2(float(v["x"]), float(v["y"]))
    x, y = v
    return Vec2(float(x), float(y))


@dataclass(frozen=True)
class ComfortEvent:
    t: float
    pair: tuple[str, str]
    ttc: TtcValue
    discomfort_raw: float
    discomfort_clamped: float
    alert: bool

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "pair": list(self.pair),
            "ttc": {"kind": self.ttc.kind.value, "value": self.ttc.value},
            "discomfort_raw": self.discomfort_raw,
            "discomfort_clamped": self.discomfort_clamped,
            "alert": self.alert,
        }


class StreamEstimator:
    """Single-writer state machine turning agent updates into comfort events.

    Parameters
    ----------
    model : CalibrationModel
        Curve mapping perceived TTC to discomfort.
    threshold : float
        Clamped discomfort level at or above which an event raises an alert.
    staleness : float
        Largest time gap (s) between two agents' states that is still paired.
    """

    def __init__(self, model: CalibrationModel, threshold: float = 2.0, staleness: float = DEFAULT_STALENESS):
        if not staleness >= 0:
            raise InvalidInput(f"staleness must be >= 0, got {staleness!r}")
        self.model = model
        self.staleness = float(staleness)
        self._threshold = 0.0
        self.set_threshold(threshold)
        self._latest: dict[str, KinematicState | None] = {}
        self._last_position: dict[str, tuple[float, Vec2]] = {}

    @property
    def threshold(self) -> float:
        return self._threshold

    def set_threshold(self, level: float) -> None:
        level = float(level)
        if not 0.0 <= level <= MAX_LEVEL:
            raise OutOfRange(f"alert threshold must lie in [0, 6], got {level!r}")
        self._threshold = level

    def _discomfort(self, ttc: TtcValue) -> tuple[float, float]:
        if ttc.kind is TtcKind.COINCIDENT:
            return float(MAX_LEVEL), float(MAX_LEVEL)
        if not ttc.is_approaching:
            return 0.0, 0.0
        return estimate(self.model, ttc.value)

    def push_update(self, update: AgentUpdate) -> list[ComfortEvent]:
        """Record ``update`` and return the events it produces (possibly none).

        Raises
        ------
        TimeRegression
            The update is older than the agent's previous one.
        """
        prev = self._last_position.get(update.agent_id)
        if prev is not None and update.t < prev[0]:
            raise TimeRegression(
                f"agent {update.agent_id!r}: t={update.t!r} precedes previous update t={prev[0]!r}"
            )
        velocity = update.velocity
        if velocity is None and prev is not None and update.t > prev[0]:
            velocity = (update.position - prev[1]) * (1.0 / (update.t - prev[0]))
        if velocity is None:
            # most recent known velocity, if any, carries over
            old = self._latest.get(update.agent_id)
            velocity = old.velocity if old is not None and update.t == old.t else None
        self._last_position[update.agent_id] = (update.t, update.position)
        state = None if velocity is None else KinematicState(update.t, update.position, velocity)
        self._latest[update.agent_id] = state
        if state is None:
            return []

        events = []
        for other_id in sorted(self._latest):
            other = self._latest[other_id]
            if other_id == update.agent_id or other is None:
                continue
            if abs(state.t - other.t) > self.staleness + EPS_TIME:
                continue
            a, b = self._synchronize(state, other)
            ttc = pair_ttc(a, b)
            raw, clamped = self._discomfort(ttc)
            events.append(
                ComfortEvent(
                    t=min(state.t, other.t),
                    pair=tuple(sorted((update.agent_id, other_id))),
                    ttc=ttc,
                    discomfort_raw=raw,
                    discomfort_clamped=clamped,
                    alert=clamped >= self._threshold,
                )
            )
        return events

    @staticmethod
    def _synchronize(a: KinematicState, b: KinematicState) -> tuple[KinematicState, KinematicState]:
        if abs(a.t - b.t) <= EPS_TIME:
            return a, b
        if a.t > b.t:
            a = KinematicState(b.t, a.position - a.velocity * (a.t - b.t), a.velocity)
        else:
            b = KinematicState(a.t, b.position - b.velocity * (b.t - a.t), b.velocity)
        return a, b

    def push_many(self, updates: Iterable[AgentUpdate]) -> Iterator[ComfortEvent]:
        for update in updates:
            yield from self.push_update(update)


def replay_states(
    estimator: StreamEstimator,
    agents: Mapping[str, Sequence[KinematicState]],
) -> list[ComfortEvent]:
    """Feed aligned state lists to ``estimator`` timestep by timestep.

    At each timestep the agents are pushed in the mapping's order, so the
    last agent's update meets every peer at the same timestamp and its
    events are unextrapolated.
    """
    ids = list(agents)
    n = len(agents[ids[0]])
    events = []
    for k in range(n):
        for agent_id in ids:
            s = agents[agent_id][k]
            events.extend(estimator.push_update(AgentUpdate(agent_id, s.t, s.position, s.velocity)))
    return events


def run_line_protocol(estimator: StreamEstimator, lines: Iterable[str], out: TextIO) -> int:
    """Read JSON updates line by line and write one JSON event per line.

    Blank lines are skipped. Returns the number of events written.
    """
    count = 0
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: not valid JSON ({exc})") from exc
        if not isinstance(record, Mapping):
            raise FormatError(f"line {lineno}: expected a JSON object")
        for event in estimator.push_update(AgentUpdate.from_dict(record)):
            out.write(json.dumps(event.to_dict()) + "\n")
            count += 1
        out.flush()
    return count
