import numpy as np
import pytest
from hypothesis import settings

from perceived_ttc.trajectory import Trajectory, TrialRecord

RATE = 120.0

# pytest --hypothesis-profile=thorough for a long property run
settings.register_profile("thorough", max_examples=5000, deadline=None)


def line_trajectory(agent_id, start, velocity, duration, rate=RATE, t0=0.0):
    n = int(round(duration * rate)) + 1
    t = t0 + np.arange(n) / rate
    xy = np.asarray(start, float) + np.outer(t - t0, np.asarray(velocity, float))
    return Trajectory(agent_id, t, xy)


@pytest.fixture
def offset_pass():
    """Mover at 2 m/s along y=0 from the origin; static agent at (10, 1)."""
    mover = line_trajectory("mover", (0.0, 0.0), (2.0, 0.0), 8.0)
    target = line_trajectory("target", (10.0, 1.0), (0.0, 0.0), 8.0)
    return mover, target


@pytest.fixture
def offset_pass_trial(offset_pass):
    mover, target = offset_pass
    return TrialRecord("offset", "passing", mover, target, {"rider": 2, "pedestrian": 1})


@pytest.fixture
def head_on():
    """10 m apart, closing at 5 m/s, stopping just before impact at t=2 s."""
    a = line_trajectory("a", (0.0, 0.0), (2.0, 0.0), 1.9)
    b = line_trajectory("b", (10.0, 0.0), (-3.0, 0.0), 1.9)
    return a, b


# acceptance report: one line per criterion, repeated in the terminal summary

_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    def record(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
