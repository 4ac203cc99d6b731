"""Trial pipeline: timed trajectories to the per-trial minimum perceived TTC.

The stages are

1. :func:`estimate_velocities` -- central differences, optional smoothing;
2. :func:`align_pair` -- both agents on one common timeline;
3. :func:`ttc_series` -- relative state and perceived TTC per timestamp;
4. :func:`detect_pass` -- instant of minimum inter-agent range;
5. :func:`min_perceived_ttc` -- smallest positive TTC before the pass.

:func:`analyze_trial` chains them for a :class:`TrialRecord`.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptySeries,
    InvalidInput,
    NoApproachPhase,
    NoOverlap,
    TimestampMismatch,
    TooFewSamples,
)
from .kinematics import EPS_RANGE, EPS_SPEED, EPS_TIME, KinematicState, TtcKind, TtcValue, Vec2

MIN_OVERLAP = 1.0  # s
JITTER_TOLERANCE = 0.2


class TrialKind(str, enum.Enum):
    FACING = "facing"
    PASSING = "passing"


ROLES = ("rider", "pedestrian")


class Trajectory:
    """Timed 2-D samples of one agent.

    Parameters
    ----------
    agent_id : str
    t : array_like, shape (n,)
        Strictly increasing timestamps in seconds.
    xy : array_like, shape (n, 2)
        Positions in meters.
    """

    def __init__(self, agent_id: str, t, xy):
        t = np.asarray(t, dtype=float)
        xy = np.asarray(xy, dtype=float)
        if t.ndim != 1 or xy.shape != (t.size, 2):
            raise InvalidInput(f"expected t of shape (n,) and xy of shape (n, 2), got {t.shape} and {xy.shape}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(xy))):
            raise InvalidInput(f"trajectory {agent_id!r} contains non-finite samples")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise InvalidInput(f"trajectory {agent_id!r}: timestamps must be strictly increasing")
        self.agent_id = str(agent_id)
        self.t = t
        self.xy = xy
        self.t.setflags(write=False)
        self.xy.setflags(write=False)

    @classmethod
    def from_samples(cls, agent_id: str, samples: Sequence[tuple[float, float, float]]) -> Trajectory:
        arr = np.asarray(samples, dtype=float).reshape(-1, 3)
        return cls(agent_id, arr[:, 0], arr[:, 1:])

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return [(float(t), float(x), float(y)) for t, (x, y) in zip(self.t, self.xy)]

    def __len__(self) -> int:
        return self.t.size

    @property
    def start(self) -> float:
        return float(self.t[0])

    @property
    def end(self) -> float:
        return float(self.t[-1])

    @property
    def period(self) -> float:
        """Median sample interval in seconds."""
        if self.t.size < 2:
            raise TooFewSamples(f"trajectory {self.agent_id!r} has {self.t.size} sample(s)")
        return float(np.median(np.diff(self.t)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.agent_id == other.agent_id
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.xy, other.xy)
        )

    def __repr__(self) -> str:
        return f"Trajectory({self.agent_id!r}, n={len(self)})"


@dataclass
class TrialRecord:
    trial_id: str
    kind: TrialKind
    rider: Trajectory
    pedestrian: Trajectory
    reported_discomfort: dict[str, int] | None = None
    smoothing_window: float | None = None

    def __post_init__(self) -> None:
        self.kind = TrialKind(self.kind)
        if self.reported_discomfort is not None:
            for role, level in self.reported_discomfort.items():
                if role not in ROLES:
                    raise InvalidInput(f"unknown role {role!r}")
                if int(level) != level or not 0 <= level <= 6:
                    raise InvalidInput(f"discomfort level {level!r} outside 0..6")


@dataclass(frozen=True, slots=True)
class TtcSample:
    t: float
    ttc: TtcValue
    range: float
    closing_speed: float


@dataclass
class TtcSeries:
    samples: list[TtcSample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def ranges(self) -> np.ndarray:
        return np.array([s.range for s in self.samples])


@dataclass(frozen=True)
class TrialAnalysis:
    pass_time: float
    min_ttc: float
    min_ttc_time: float
    series: TtcSeries


def _moving_average(t: np.ndarray, values: np.ndarray, window: float) -> np.ndarray:
    # centered, time-based; the window shrinks symmetrically near the ends
    half = 0.5 * window
    idx = np.arange(t.size)
    lo = np.searchsorted(t, t - half - 1e-12, side="left")
    hi = np.searchsorted(t, t + half + 1e-12, side="right") - 1
    span = np.minimum(idx - lo, hi - idx)
    csum = np.vstack([np.zeros((1, values.shape[1])), np.cumsum(values, axis=0)])
    return (csum[idx + span + 1] - csum[idx - span]) / (2 * span + 1)[:, None]


def _velocity_array(traj: Trajectory, smoothing_window: float) -> np.ndarray:
    n = len(traj)
    if n < 3:
        raise TooFewSamples(f"trajectory {traj.agent_id!r} has {n} sample(s), need at least 3")
    if not smoothing_window >= 0:
        raise InvalidInput(f"smoothing_window must be >= 0, got {smoothing_window!r}")
    t, xy = traj.t, traj.xy
    dt = np.diff(t)
    med = np.median(dt)
    if np.any(np.abs(dt - med) > JITTER_TOLERANCE * med):
        warnings.warn(
            f"trajectory {traj.agent_id!r}: sample intervals deviate more than "
            f"{JITTER_TOLERANCE:.0%} from the median",
            stacklevel=3,
        )
    vel = np.empty_like(xy)
    vel[1:-1] = (xy[2:] - xy[:-2]) / (t[2:] - t[:-2])[:, None]
    vel[0] = (xy[1] - xy[0]) / (t[1] - t[0])
    vel[-1] = (xy[-1] - xy[-2]) / (t[-1] - t[-2])
    if smoothing_window > 0:
        vel = _moving_average(t, vel, smoothing_window)
    return vel


def _to_states(t: np.ndarray, p: np.ndarray, v: np.ndarray) -> list[KinematicState]:
    return [
        KinematicState(tk, Vec2(px, py), Vec2(vx, vy))
        for tk, (px, py), (vx, vy) in zip(t.tolist(), p.tolist(), v.tolist())
    ]


def _from_states(states: Sequence[KinematicState]):
    t = np.array([s.t for s in states], dtype=float)
    p = np.array([[s.position.x, s.position.y] for s in states], dtype=float).reshape(-1, 2)
    v = np.array([[s.velocity.x, s.velocity.y] for s in states], dtype=float).reshape(-1, 2)
    return t, p, v


def estimate_velocities(traj: Trajectory, smoothing_window: float = 0.0) -> list[KinematicState]:
    """Finite-difference velocities for every sample of ``traj``.

    Interior samples use central differences, the two endpoints one-sided
    differences. With ``smoothing_window > 0`` the velocities are then
    averaged over a centered window of that many seconds (the window shrinks
    symmetrically near the ends).

    Raises
    ------
    TooFewSamples
        Fewer than three samples.
    """
    return _to_states(traj.t, traj.xy, _velocity_array(traj, smoothing_window))


def _interp(t_new: np.ndarray, t: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.column_stack([np.interp(t_new, t, values[:, k]) for k in range(values.shape[1])])


def _timeline_key(traj: Trajectory):
    # coarser rate first; remaining keys only make the choice independent of argument order
    return (traj.period, traj.start, -len(traj), traj.agent_id)


def _aligned(a: Trajectory, b: Trajectory, smoothing_window: float):
    for traj in (a, b):
        if len(traj) < 3:
            raise TooFewSamples(f"trajectory {traj.agent_id!r} has {len(traj)} sample(s), need at least 3")
    start = max(a.start, b.start)
    end = min(a.end, b.end)
    if end - start < MIN_OVERLAP - 1e-9:
        raise NoOverlap(
            f"trajectories {a.agent_id!r} and {b.agent_id!r} overlap for "
            f"{max(0.0, end - start):.3g} s, need {MIN_OVERLAP} s"
        )
    va = _velocity_array(a, smoothing_window)
    vb = _velocity_array(b, smoothing_window)
    if np.array_equal(a.t, b.t):
        return a.t, a.xy, va, b.xy, vb

    base = max((a, b), key=_timeline_key)
    mask = (base.t >= start - 1e-12) & (base.t <= end + 1e-12)
    timeline = base.t[mask]

    def resample(traj, vel):
        if traj is base:
            return traj.xy[mask], vel[mask]
        return _interp(timeline, traj.t, traj.xy), _interp(timeline, traj.t, vel)

    pa, va = resample(a, va)
    pb, vb = resample(b, vb)
    return timeline, pa, va, pb, vb


def align_pair(
    a: Trajectory, b: Trajectory, smoothing_window: float = 0.0
) -> tuple[list[KinematicState], list[KinematicState]]:
    """Put ``a`` and ``b`` on one timeline over their overlap window.

    The timeline is the native timestamps of the coarser-rate trajectory that
    fall inside the overlap; the other trajectory's positions and velocities
    are linearly interpolated onto it. Velocities are estimated on the native
    samples before resampling.

    Raises
    ------
    TooFewSamples
        Either trajectory has fewer than three samples.
    NoOverlap
        The trajectories share less than one second.
    """
    t, pa, va, pb, vb = _aligned(a, b, smoothing_window)
    return _to_states(t, pa, va), _to_states(t, pb, vb)


def _series(t, pa, va, pb, vb) -> TtcSeries:
    # elementwise the same float operations as relative_state + perceived_ttc
    px, py = (pb - pa).T
    vx, vy = (vb - va).T
    rng = np.sqrt(px * px + py * py)
    pv = px * vx + py * vy
    pos = rng > 0.0
    closing = np.zeros_like(rng)
    closing[pos] = -pv[pos] / rng[pos]
    coincident_ttc = TtcValue.coincident()
    no_approach_ttc = TtcValue.no_approach()
    samples = []
    for tk, r, c in zip(t.tolist(), rng.tolist(), closing.tolist()):
        if r < EPS_RANGE:
            ttc = coincident_ttc
        elif abs(c) < EPS_SPEED:
            ttc = no_approach_ttc
        else:
            ttc = TtcValue(TtcKind.FINITE, r / c)
        samples.append(TtcSample(t=tk, ttc=ttc, range=r, closing_speed=c))
    return TtcSeries(samples)


def series_from_states(a: Sequence[KinematicState], b: Sequence[KinematicState]) -> TtcSeries:
    """Perceived TTC for already-aligned state lists."""
    if len(a) != len(b):
        raise InvalidInput(f"state lists differ in length ({len(a)} vs {len(b)})")
    for sa, sb in zip(a, b):
        if abs(sa.t - sb.t) > EPS_TIME:
            raise TimestampMismatch(f"states at t={sa.t!r} and t={sb.t!r} are not simultaneous")
    ta, pa, va = _from_states(a)
    _, pb, vb = _from_states(b)
    return _series(ta, pa, va, pb, vb)


def ttc_series(a: Trajectory, b: Trajectory, smoothing_window: float = 0.0) -> TtcSeries:
    """Perceived TTC of the pair at every aligned timestamp."""
    return _series(*_aligned(a, b, smoothing_window))


def detect_pass(series: TtcSeries) -> float:
    """Timestamp of the minimum inter-agent range (earliest on ties)."""
    if len(series) == 0:
        raise EmptySeries("cannot locate the passing moment of an empty series")
    best = min(range(len(series)), key=lambda k: (series[k].range, k))
    return series[best].t


def min_perceived_ttc(series: TtcSeries, pass_time: float) -> tuple[float, float]:
    """Smallest positive finite TTC strictly before ``pass_time``.

    Returns
    -------
    (min_ttc, at) : tuple of float
        The value in seconds and its timestamp (earliest on ties).

    Raises
    ------
    EmptySeries, NoApproachPhase
    """
    if len(series) == 0:
        raise EmptySeries("empty series")
    best = None
    for s in series:
        if s.t >= pass_time:
            break
        if s.ttc.is_approaching and (best is None or s.ttc.value < best.ttc.value):
            best = s
    if best is None:
        raise NoApproachPhase(f"no approaching sample before the pass at t={pass_time:.6g} s")
    return best.ttc.value, best.t


def analyze_trial(trial: TrialRecord, smoothing_window: float | None = None) -> TrialAnalysis:
    """Pass time and minimum perceived TTC of one trial.

    ``smoothing_window`` overrides the trial's own setting; if neither is
    given velocities are not smoothed.
    """
    if smoothing_window is None:
        smoothing_window = trial.smoothing_window or 0.0
    series = ttc_series(trial.rider, trial.pedestrian, smoothing_window)
    pass_time = detect_pass(series)
    min_ttc, at = min_perceived_ttc(series, pass_time)
    return TrialAnalysis(pass_time=pass_time, min_ttc=min_ttc, min_ttc_time=at, series=series)


def trajectories_by_agent(rows: Mapping[str, Sequence[tuple[float, float, float]]]) -> dict[str, Trajectory]:
    """Build trajectories from ``agent_id -> [(t, x, y), ...]``, sorting by time."""
    out = {}
    for agent_id, samples in rows.items():
        arr = np.asarray(sorted(samples), dtype=float).reshape(-1, 3)
        out[agent_id] = Trajectory(agent_id, arr[:, 0], arr[:, 1:])
    return out
