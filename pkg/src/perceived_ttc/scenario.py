"""Synthetic facing and passing trials.

A rider and a pedestrian move along straight lanes of a 35 m x 3 m corridor
running along +x. The pedestrian keeps a constant velocity. The rider cruises
at constant speed until the perceived TTC drops into ``(0, reaction_ttc]``,
then brakes or swerves away for as long as the TTC stays at or below the
threshold (a swerve also ends once the lateral clearance is reached). This
keeps the rider's TTC near the threshold, which is the only behavior the
generator tries to reproduce.

Corridor coordinates: ``x`` in ``[0, corridor_length]``, ``y`` in
``[-corridor_width / 2, corridor_width / 2]``. ``lateral_offset`` is the
pedestrian's lane minus the rider's lane.
"""

from __future__ import annotations

import math
import string
from dataclasses import asdict, dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .calibration import CalibrationModel, DiscomfortLevel, MAX_LEVEL, estimate
from .errors import InfeasibleSpec, InvalidInput, InvalidSpec
from .kinematics import EPS_RANGE, EPS_SPEED
from .trajectory import Trajectory, TrialKind, TrialRecord, analyze_trial

MAX_RIDER_SPEED = 5.0  # m/s
DEFAULT_REACTION_TTC = {TrialKind.FACING: 0.5, TrialKind.PASSING: 1.2}
MAX_DURATION = 120.0  # s


@dataclass(frozen=True)
class Brake:
    decel: float = 1.5  # m/s^2

    def to_dict(self) -> dict:
        return {"type": "brake", "decel": self.decel}


@dataclass(frozen=True)
class Swerve:
    lateral_speed: float = 1.0  # m/s
    clearance: float = 1.0  # m, lateral separation that ends the swerve

    def to_dict(self) -> dict:
        return {"type": "swerve", "lateral_speed": self.lateral_speed, "clearance": self.clearance}


Reaction = Brake | Swerve


def reaction_from_dict(d: Mapping | None) -> Reaction | None:
    if d is None:
        return None
    d = dict(d)
    kind = d.pop("type", None)
    try:
        if kind == "brake":
            return Brake(**d)
        if kind == "swerve":
            return Swerve(**d)
    except TypeError as exc:
        raise InvalidSpec(f"bad reaction parameters: {exc}") from exc
    raise InvalidSpec(f"unknown reaction type {kind!r}; expected 'brake' or 'swerve'")


@dataclass(frozen=True)
class ScenarioSpec:
    """Geometry and behavior of one synthetic trial.

    ``reaction_ttc`` defaults to 0.5 s for facing and 1.2 s for passing
    trials; ``reaction_ttc=0`` or ``reaction=None`` disables the reaction.
    ``position_noise`` adds seeded Gaussian noise (m, standard deviation) to
    the recorded positions.
    """

    kind: TrialKind
    rider_speed: float
    pedestrian_speed: float
    initial_gap: float
    lateral_offset: float = 0.0
    reaction_ttc: float | None = None
    reaction: Reaction | None = field(default_factory=Swerve)
    corridor_length: float = 35.0
    corridor_width: float = 3.0
    sample_rate: float = 120.0
    seed: int = 0
    position_noise: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TrialKind(self.kind))
        if self.reaction_ttc is None:
            object.__setattr__(self, "reaction_ttc", DEFAULT_REACTION_TTC[self.kind])
        self.validate()

    @property
    def reacts(self) -> bool:
        return self.reaction is not None and self.reaction_ttc > 0

    @property
    def clearance(self) -> float:
        return self.reaction.clearance if isinstance(self.reaction, Swerve) else 0.0

    def validate(self) -> None:
        values = [self.rider_speed, self.pedestrian_speed, self.initial_gap, self.lateral_offset,
                  self.reaction_ttc, self.corridor_length, self.corridor_width, self.sample_rate,
                  self.position_noise]
        if not all(math.isfinite(v) for v in values):
            raise InvalidSpec("scenario values must be finite")
        if not 0 < self.rider_speed <= MAX_RIDER_SPEED:
            raise InvalidSpec(f"rider_speed must be in (0, {MAX_RIDER_SPEED}] m/s, got {self.rider_speed}")
        if self.pedestrian_speed < 0:
            raise InvalidSpec("pedestrian_speed must be >= 0")
        if not 0 < self.initial_gap < self.corridor_length:
            raise InvalidSpec("initial_gap must be positive and shorter than the corridor")
        if self.reaction_ttc < 0:
            raise InvalidSpec("reaction_ttc must be >= 0 (0 disables the reaction)")
        if self.sample_rate <= 0 or self.position_noise < 0:
            raise InvalidSpec("sample_rate must be > 0 and position_noise >= 0")
        if isinstance(self.reaction, Brake) and self.reaction.decel < 0:
            raise InvalidSpec("brake decel must be >= 0")
        if isinstance(self.reaction, Swerve) and (self.reaction.lateral_speed < 0 or self.reaction.clearance < 0):
            raise InvalidSpec("swerve lateral_speed and clearance must be >= 0")
        if abs(self.lateral_offset) + self.clearance > self.corridor_width:
            raise InvalidSpec("|lateral_offset| + clearance exceeds the corridor width")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["reaction"] = None if self.reaction is None else self.reaction.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> ScenarioSpec:
        d = dict(d)
        if "reaction" in d:
            d["reaction"] = reaction_from_dict(d["reaction"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise InvalidSpec(f"bad scenario fields: {exc}") from exc


def _segment_min_distance(rel: np.ndarray) -> float:
    """Closest approach of a piecewise-linear relative path (rows = samples)."""
    p0, p1 = rel[:-1], rel[1:]
    d = p1 - p0
    dd = np.einsum("ij,ij->i", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(dd > 0, -np.einsum("ij,ij->i", p0, d) / dd, 0.0)
    s = np.clip(s, 0.0, 1.0)
    closest = p0 + s[:, None] * d
    return float(np.sqrt(np.einsum("ij,ij->i", closest, closest)).min())


def _decision_ttc(dx: float, dy: float, dvx: float, dvy: float) -> float | None:
    # same arithmetic as kinematics.perceived_ttc, inlined for the per-step loop
    rng = math.sqrt(dx * dx + dy * dy)
    if rng < EPS_RANGE:
        return 0.0
    closing = -(dx * dvx + dy * dvy) / rng
    if abs(closing) < EPS_SPEED:
        return None
    return rng / closing


def generate(
    spec: ScenarioSpec,
    trial_id: str = "trial",
    rider_id: str = "rider",
    pedestrian_id: str = "pedestrian",
) -> TrialRecord:
    """Simulate one trial and return it without discomfort labels.

    Raises
    ------
    InfeasibleSpec
        A reaction is configured but the agents still coincide.
    """
    dt = 1.0 / spec.sample_rate
    length, half_w = spec.corridor_length, spec.corridor_width / 2
    facing = spec.kind is TrialKind.FACING

    sgn = 1.0 if spec.lateral_offset >= 0 else -1.0
    band = max(abs(spec.lateral_offset), spec.clearance)
    yp = sgn * band / 2
    yr = yp - spec.lateral_offset
    if facing:
        xr = (length - spec.initial_gap) / 2
        xp = xr + spec.initial_gap
        vp = -spec.pedestrian_speed
    else:
        xr, xp = 0.0, spec.initial_gap
        vp = spec.pedestrian_speed
    away = math.copysign(1.0, yr - yp) if yr != yp else -sgn

    u = spec.rider_speed
    rider, ped = [], []
    n_max = int(MAX_DURATION * spec.sample_rate)
    for _ in range(n_max):
        rider.append((xr, yr))
        ped.append((xp, yp))
        v_lat = 0.0
        if spec.reacts:
            ttc = _decision_ttc(xp - xr, yp - yr, vp - u, 0.0)
            triggered = ttc is not None and 0.0 < ttc <= spec.reaction_ttc
            if triggered and isinstance(spec.reaction, Brake):
                u = max(0.0, u - spec.reaction.decel * dt)
            elif triggered:
                gap = spec.reaction.clearance - abs(yr - yp)
                if gap > 0:
                    v_lat = away * min(spec.reaction.lateral_speed, gap / dt)
        nxr, nyr, nxp = xr + u * dt, yr + v_lat * dt, xp + vp * dt
        if not (0.0 <= nxr <= length and 0.0 <= nxp <= length):
            break
        xr, yr, xp = nxr, nyr, nxp

    rider_xy = np.array(rider)
    ped_xy = np.array(ped)
    t = np.arange(len(rider)) / spec.sample_rate
    if t.size < 3 or t[-1] < 1.0:
        raise InvalidSpec("scenario leaves the corridor before one second of overlap")
    if spec.reacts and _segment_min_distance(ped_xy - rider_xy) < EPS_RANGE:
        raise InfeasibleSpec(
            f"{spec.kind.value} trial: the configured reaction cannot keep the agents apart"
        )
    if spec.position_noise > 0:
        rng = np.random.default_rng(spec.seed)
        for xy in (rider_xy, ped_xy):
            xy += rng.normal(0.0, spec.position_noise, xy.shape)
            xy[:, 0] = np.clip(xy[:, 0], 0.0, length)
            xy[:, 1] = np.clip(xy[:, 1], -half_w, half_w)
    return TrialRecord(
        trial_id=trial_id,
        kind=spec.kind,
        rider=Trajectory(rider_id, t, rider_xy),
        pedestrian=Trajectory(pedestrian_id, t.copy(), ped_xy),
        reported_discomfort=None,
        smoothing_window=0.25 if spec.position_noise > 0 else 0.0,
    )


@dataclass(frozen=True)
class LabelModel:
    calibration: CalibrationModel
    noise_sigma: float = 0.3
    seed: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def to_dict(self) -> dict:
        return {"calibration": self.calibration.to_dict(), "noise_sigma": self.noise_sigma, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: Mapping) -> LabelModel:
        return cls(CalibrationModel.from_dict(d["calibration"]), float(d.get("noise_sigma", 0.3)), int(d.get("seed", 0)))


def synth_label(min_ttc: float, model: LabelModel, rng: np.random.Generator | None = None) -> DiscomfortLevel:
    """Noisy discomfort level drawn around the calibration curve.

    Without ``rng`` the noise comes from a fresh generator seeded with
    ``model.seed``, so repeated calls return the same level. Halves round up.
    """
    if not min_ttc > 0:
        raise InvalidInput(f"min_ttc must be positive, got {min_ttc!r}")
    raw, _ = estimate(model.calibration, min_ttc)
    if rng is None:
        rng = model.rng()
    noise = rng.normal(0.0, model.noise_sigma) if model.noise_sigma > 0 else 0.0
    level = min(float(MAX_LEVEL), max(0.0, raw + noise))
    return DiscomfortLevel(int(math.floor(level + 0.5)))


def label_trial(trial: TrialRecord, model: LabelModel, rng: np.random.Generator | None = None) -> TrialRecord:
    """Copy of ``trial`` with synthetic labels for both roles."""
    if rng is None:
        rng = model.rng()
    min_ttc = analyze_trial(trial).min_ttc
    labels = {role: synth_label(min_ttc, model, rng).value for role in ("rider", "pedestrian")}
    return replace(trial, reported_discomfort=labels)


# ensemble generation

#: uniform half-widths applied around a base spec, per field
DEFAULT_JITTER = {
    "rider_speed": 0.6,
    "pedestrian_speed": 0.2,
    "initial_gap": 2.0,
    "lateral_offset": 0.6,
}


def jitter_spec(spec: ScenarioSpec, rng: np.random.Generator, jitter: Mapping[str, float]) -> ScenarioSpec:
    """Perturb numeric fields uniformly by +/- ``jitter[field]``, clipped to validity."""
    changes = {}
    for name, half in jitter.items():
        if name not in DEFAULT_JITTER and name != "reaction_ttc":
            raise InvalidSpec(f"cannot jitter field {name!r}")
        value = getattr(spec, name) + rng.uniform(-half, half)
        changes[name] = value
    if "rider_speed" in changes:
        changes["rider_speed"] = float(np.clip(changes["rider_speed"], 0.5, MAX_RIDER_SPEED))
    if "pedestrian_speed" in changes:
        changes["pedestrian_speed"] = max(0.0, changes["pedestrian_speed"])
    if "initial_gap" in changes:
        changes["initial_gap"] = float(np.clip(changes["initial_gap"], 1.0, spec.corridor_length - 1.0))
    if "lateral_offset" in changes:
        room = spec.corridor_width - spec.clearance
        changes["lateral_offset"] = float(np.clip(changes["lateral_offset"], -room, room))
    if "reaction_ttc" in changes:
        changes["reaction_ttc"] = max(0.05, changes["reaction_ttc"])
    return replace(spec, **changes)


def set_letter(index: int) -> str:
    letters = string.ascii_uppercase
    return letters[index] if index < len(letters) else f"S{index}"


def simulate_ensemble(
    scenarios: Sequence[ScenarioSpec],
    n: int,
    seed: int = 0,
    jitter: Mapping[str, float] | Sequence[Mapping[str, float]] | None = None,
    sets: int = 1,
    label_model: LabelModel | None = None,
) -> list[TrialRecord]:
    """``n`` trials per scenario, spread over ``sets`` rider/pedestrian pairs.

    ``jitter`` is one mapping for all scenarios or one per scenario (see
    :func:`jitter_spec`). Trial ``k`` of each scenario belongs to set
    ``k % sets``; agent ids are ``rider_<set>`` and ``pedestrian_<set>``.
    Everything derives from ``seed``.
    """
    if n < 0 or sets < 1:
        raise InvalidInput("n must be >= 0 and sets >= 1")
    if jitter is None or isinstance(jitter, Mapping):
        jitters = [dict(jitter or {})] * len(scenarios)
    else:
        jitters = [dict(j) for j in jitter]
        if len(jitters) != len(scenarios):
            raise InvalidInput("need one jitter mapping per scenario")
    root = np.random.SeedSequence(seed)
    trials = []
    for s_idx, (base, jit, child) in enumerate(zip(scenarios, jitters, root.spawn(len(scenarios)))):
        rng = np.random.default_rng(child)
        for k in range(n):
            letter = set_letter(k % sets)
            spec = jitter_spec(base, rng, jit) if jit else base
            spec = replace(spec, seed=int(rng.integers(2**31)))
            trial = generate(
                spec,
                trial_id=f"{base.kind.value}-{s_idx}-{k:04d}",
                rider_id=f"rider_{letter}",
                pedestrian_id=f"pedestrian_{letter}",
            )
            if label_model is not None:
                trial = label_trial(trial, label_model, rng)
            trials.append(trial)
    return trials


# Default facing/passing pair used by the examples and the acceptance run. The
# per-trial spread of reaction_ttc stands in for rider-to-rider differences.
DEFAULT_SCENARIOS = (
    ScenarioSpec(TrialKind.FACING, rider_speed=2.0, pedestrian_speed=1.2, initial_gap=12.0,
                 lateral_offset=0.3, reaction_ttc=0.5, reaction=Swerve(2.0, 1.5)),
    ScenarioSpec(TrialKind.PASSING, rider_speed=3.0, pedestrian_speed=1.2, initial_gap=6.0,
                 lateral_offset=0.3, reaction_ttc=1.2, reaction=Swerve(1.5, 1.3)),
)
ENSEMBLE_JITTER = (
    {"rider_speed": 0.5, "pedestrian_speed": 0.2, "initial_gap": 2.0, "lateral_offset": 0.6, "reaction_ttc": 0.2},
    {"rider_speed": 0.5, "pedestrian_speed": 0.2, "initial_gap": 2.0, "lateral_offset": 0.6, "reaction_ttc": 0.4},
)


def default_ensemble(
    n_sets: int = 10, trials_per_set: int = 10, seed: int = 0, label_model: LabelModel | None = None
) -> list[TrialRecord]:
    """``n_sets`` participant sets, each with that many facing and passing trials."""
    return simulate_ensemble(
        DEFAULT_SCENARIOS,
        n_sets * trials_per_set,
        seed=seed,
        jitter=ENSEMBLE_JITTER,
        sets=n_sets,
        label_model=label_model,
    )
