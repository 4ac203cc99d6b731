"""Exception hierarchy.

Every error class carries a distinct ``exit_code`` used by the command line
front end, so scripted callers can tell failure modes apart.
"""


class PerceivedTtcError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 10


class InvalidInput(PerceivedTtcError, ValueError):
    """Input violates a documented invariant (non-finite value, bad range...)."""

    exit_code = 11


class FormatError(PerceivedTtcError, ValueError):
    """A CSV/JSON file or protocol line does not follow the documented layout."""

    exit_code = 12


# kinematics
class TimestampMismatch(PerceivedTtcError):
    exit_code = 20


# trajectory pipeline
class TooFewSamples(PerceivedTtcError):
    exit_code = 30


class NoOverlap(PerceivedTtcError):
    exit_code = 31


class EmptySeries(PerceivedTtcError):
    exit_code = 32


class NoApproachPhase(PerceivedTtcError):
    exit_code = 33


class EmptyManifest(PerceivedTtcError):
    exit_code = 34


# calibration
class TooFewPoints(PerceivedTtcError):
    exit_code = 40


class SingularDesign(PerceivedTtcError):
    exit_code = 41


class NonPositiveX(PerceivedTtcError):
    exit_code = 42


class DegenerateObservations(PerceivedTtcError):
    exit_code = 43


class NonPositiveTtc(PerceivedTtcError):
    exit_code = 44


# stats
class EmptyInput(PerceivedTtcError):
    exit_code = 50


# scenario simulation
class InvalidSpec(PerceivedTtcError, ValueError):
    exit_code = 60


class InfeasibleSpec(PerceivedTtcError):
    exit_code = 61


# streaming
class TimeRegression(PerceivedTtcError):
    exit_code = 70


class OutOfRange(PerceivedTtcError, ValueError):
    exit_code = 71
