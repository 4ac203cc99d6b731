"""Discomfort-versus-TTC calibration curves.

Three families map a minimum perceived TTC ``x`` (s) to an expected
discomfort level ``y`` on the 0..6 scale:

* ``line``        y = a*x + b
* ``exp``         y = a*exp(b*x)
* ``power``       y = a*x**b

Lines are fitted in closed form. The two nonlinear families are fitted by
damped Gauss-Newton on the residuals in the original (not log) space,
started from a log-space regression.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateObservations,
    FormatError,
    InvalidInput,
    NonPositiveTtc,
    NonPositiveX,
    SingularDesign,
    TooFewPoints,
)

MAX_LEVEL = 6
LEVEL_LABELS = (
    "Comfortable",
    "Slightly uncomfortable",
    "Uncomfortable",
    "Annoying",
    "Dangerous",
    "Very dangerous or near crash",
    "Collision",
)

# Gauss-Newton controls
MAX_ITER = 200
REL_TOL = 1e-12
MAX_HALVINGS = 30
LOG_INIT_FLOOR = 0.05


@dataclass(frozen=True)
class DiscomfortLevel:
    value: int

    def __post_init__(self) -> None:
        if int(self.value) != self.value or not 0 <= self.value <= MAX_LEVEL:
            raise InvalidInput(f"discomfort level must be an integer in 0..6, got {self.value!r}")

    @property
    def label(self) -> str:
        return LEVEL_LABELS[self.value]

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class ObservationPoint:
    min_ttc: float
    discomfort: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.min_ttc) and self.min_ttc > 0):
            raise InvalidInput(f"min_ttc must be positive and finite, got {self.min_ttc!r}")
        if not 0 <= self.discomfort <= MAX_LEVEL:
            raise InvalidInput(f"discomfort must lie in [0, 6], got {self.discomfort!r}")


class FitKind(str, enum.Enum):
    LINE = "line"
    EXPONENTIAL = "exp"
    POWER = "power"

    @classmethod
    def parse(cls, name: str | FitKind) -> FitKind:
        if isinstance(name, FitKind):
            return name
        aliases = {"exponential": "exp", "linear": "line"}
        try:
            return cls(aliases.get(name.lower(), name.lower()))
        except ValueError:
            raise InvalidInput(f"unknown fit kind {name!r}; expected line, exp or power") from None


class Correlation(str, enum.Enum):
    WEAK = "weak"
    MODERATE = "moderate"
    STRONG = "strong"


@dataclass(frozen=True)
class CalibrationModel:
    kind: FitKind
    a: float
    b: float
    r2: float
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FitKind.parse(self.kind))
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidInput("model constants must be finite")

    def predict(self, x):
        """Evaluate the model formula (vectorized, no clamping)."""
        x = np.asarray(x, dtype=float)
        return _formula(self.kind, self.a, self.b, x)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> CalibrationModel:
        try:
            return cls(kind=d["kind"], a=float(d["a"]), b=float(d["b"]), r2=float(d["r2"]), n=int(d["n"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"invalid calibration model record: {exc}") from exc

    def to_json(self) -> str:
        # json writes floats with repr, the shortest string that round-trips exactly
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> CalibrationModel:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FormatError(f"calibration model is not valid JSON: {exc}") from exc


def _formula(kind: FitKind, a: float, b: float, x):
    if kind is FitKind.LINE:
        return a * x + b
    if kind is FitKind.EXPONENTIAL:
        return a * np.exp(b * x)
    return a * np.power(x, b)


def _jacobian(kind: FitKind, a: float, b: float, x: np.ndarray) -> np.ndarray:
    if kind is FitKind.EXPONENTIAL:
        e = np.exp(b * x)
        return np.column_stack([e, a * x * e])
    p = np.power(x, b)
    return np.column_stack([p, a * p * np.log(x)])


def r_squared(observed: Sequence[float], predicted: Sequence[float]) -> float:
    """Coefficient of determination ``1 - SS_res / SS_tot``."""
    y = np.asarray(observed, dtype=float)
    f = np.asarray(predicted, dtype=float)
    if y.shape != f.shape or y.ndim != 1:
        raise InvalidInput(f"observed and predicted must be equal-length 1-D, got {y.shape} and {f.shape}")
    if y.size < 2:
        raise TooFewPoints(f"r_squared needs at least 2 values, got {y.size}")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateObservations("all observed values are equal; R^2 is undefined")
    ss_res = float(np.sum((y - f) ** 2))
    return 1.0 - ss_res / ss_tot


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise SingularDesign("all x values are equal")
    slope = float(dx @ (y - ym)) / sxx
    return slope, float(ym - slope * xm)


def _initial_guess(kind: FitKind, x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    keep = y > LOG_INIT_FLOOR
    xs = x[keep] if kind is FitKind.EXPONENTIAL else np.log(x[keep])
    if keep.sum() >= 2 and np.ptp(xs) > 0:
        slope, intercept = _ols(xs, np.log(y[keep]))
        return math.exp(intercept), slope
    slope, _ = _ols(x, y)
    return float(y.max()), -1.0 if slope < 0 else 1.0


@dataclass
class FitTrace:
    """Sum of squared residuals at the start and after each accepted step."""

    sse: list[float]
    iterations: int
    converged: bool


def gauss_newton(kind: FitKind, x: np.ndarray, y: np.ndarray, a0: float, b0: float):
    """Damped Gauss-Newton for the exponential and power families.

    Each iteration solves the linearized least-squares problem for a step and
    halves it (at most 30 times) until the SSE decreases; a step that never
    decreases the SSE ends the iteration. Stops when the relative SSE
    decrease falls below 1e-12 or after 200 iterations.

    Returns ``(a, b, trace)``.
    """
    beta = np.array([a0, b0], dtype=float)

    def sse_at(p):
        with np.errstate(over="ignore", invalid="ignore"):
            r = y - _formula(kind, p[0], p[1], x)
            s = float(r @ r)
        return s if math.isfinite(s) else math.inf

    sse = sse_at(beta)
    trace = [sse]
    converged = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        if sse == 0.0:
            converged = True
            break
        resid = y - _formula(kind, beta[0], beta[1], x)
        jac = _jacobian(kind, beta[0], beta[1], x)
        if not np.all(np.isfinite(jac)):
            break
        step, *_ = np.linalg.lstsq(jac, resid, rcond=None)
        scale = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = beta + scale * step
            trial_sse = sse_at(trial)
            if trial_sse < sse:
                break
            scale *= 0.5
        else:
            converged = True  # no descent direction left at working precision
            break
        decrease = (sse - trial_sse) / sse
        beta, sse = trial, trial_sse
        trace.append(sse)
        if decrease < REL_TOL:
            converged = True
            break
    return float(beta[0]), float(beta[1]), FitTrace(trace, it, converged)


def _as_xy(points: Iterable) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    for p in points:
        if isinstance(p, ObservationPoint):
            xs.append(p.min_ttc)
            ys.append(p.discomfort)
        else:
            x, y = p
            xs.append(float(x))
            ys.append(float(y))
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInput("observation points must be finite")
    return x, y


def fit(points: Iterable, kind: FitKind | str) -> CalibrationModel:
    """Fit one curve family to ``(min_ttc, discomfort)`` observations.

    ``points`` may hold :class:`ObservationPoint` objects or plain pairs.

    Raises
    ------
    TooFewPoints
        Fewer than 2 points for a line, 3 for the nonlinear families.
    SingularDesign
        All ``min_ttc`` values are equal.
    NonPositiveX
        A power fit with a non-positive ``min_ttc``.
    """
    kind = FitKind.parse(kind)
    x, y = _as_xy(points)
    need = 2 if kind is FitKind.LINE else 3
    if x.size < need:
        raise TooFewPoints(f"{kind.value} fit needs at least {need} points, got {x.size}")
    if kind is FitKind.POWER and np.any(x <= 0):
        raise NonPositiveX("power fit requires every min_ttc > 0")
    if np.ptp(x) == 0:
        raise SingularDesign("all min_ttc values are equal")

    if kind is FitKind.LINE:
        a, b = _ols(x, y)
    else:
        a0, b0 = _initial_guess(kind, x, y)
        a, b, _ = gauss_newton(kind, x, y, a0, b0)
    r2 = r_squared(y, _formula(kind, a, b, x))
    return CalibrationModel(kind=kind, a=a, b=b, r2=r2, n=int(x.size))


def estimate(model: CalibrationModel, ttc: float) -> tuple[float, float]:
    """Discomfort for a perceived TTC: ``(raw, clamped to [0, 6])``."""
    ttc = float(ttc)
    if not math.isfinite(ttc):
        raise InvalidInput(f"ttc must be finite, got {ttc!r}")
    if model.kind is FitKind.POWER and ttc <= 0:
        raise NonPositiveTtc(f"power model is undefined for ttc={ttc!r}")
    with np.errstate(over="ignore"):
        raw = float(_formula(model.kind, model.a, model.b, ttc))
    if not math.isfinite(raw):
        raise InvalidInput(f"{model.kind.value} model overflows at ttc={ttc!r}")
    return raw, min(float(MAX_LEVEL), max(0.0, raw))


def classify_correlation(r2: float) -> Correlation:
    if r2 <= 0.3:
        return Correlation.WEAK
    if r2 <= 0.6:
        return Correlation.MODERATE
    return Correlation.STRONG
