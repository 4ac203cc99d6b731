"""Perceived time-to-collision as a discomfort metric for shared-space users.

Submodules
----------
kinematics   relative state of two agents and their perceived TTC
trajectory   timed trajectories to per-trial minimum perceived TTC
calibration  discomfort-versus-TTC curve fitting and estimation
stats        notched box-plot statistics
scenario     synthetic facing/passing trials
stream       online discomfort estimation
formats      CSV / JSON file formats
cli          ``perceived-ttc`` command line tool
"""

__version__ = "0.1.0"

from .calibration import (  # noqa: E402
    CalibrationModel,
    Correlation,
    DiscomfortLevel,
    FitKind,
    ObservationPoint,
    classify_correlation,
    estimate,
    fit,
    r_squared,
)
from .kinematics import (  # noqa: E402
    KinematicState,
    RelativeState,
    TtcKind,
    TtcValue,
    Vec2,
    perceived_ttc,
    perceived_ttc_by_angle,
    relative_state,
)
from .stats import BoxStats, box_stats, group_by, notches_overlap  # noqa: E402
from .trajectory import (  # noqa: E402
    Trajectory,
    TrialAnalysis,
    TrialKind,
    TrialRecord,
    TtcSample,
    TtcSeries,
    align_pair,
    analyze_trial,
    detect_pass,
    estimate_velocities,
    min_perceived_ttc,
    ttc_series,
)

__all__ = [
    "BoxStats",
    "CalibrationModel",
    "Correlation",
    "DiscomfortLevel",
    "FitKind",
    "KinematicState",
    "ObservationPoint",
    "RelativeState",
    "Trajectory",
    "TrialAnalysis",
    "TrialKind",
    "TrialRecord",
    "TtcKind",
    "TtcSample",
    "TtcSeries",
    "TtcValue",
    "Vec2",
    "align_pair",
    "analyze_trial",
    "box_stats",
    "classify_correlation",
    "detect_pass",
    "estimate",
    "estimate_velocities",
    "fit",
    "group_by",
    "min_perceived_ttc",
    "notches_overlap",
    "perceived_ttc",
    "perceived_ttc_by_angle",
    "r_squared",
    "relative_state",
    "ttc_series",
]
