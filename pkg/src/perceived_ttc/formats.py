"""File formats: trajectory CSV, trial manifest, results CSV, run manifest.

Trajectory CSV
    Header ``t,agent_id,x,y``; one sample per row; rows of different agents
    may be grouped or interleaved.

Trial manifest (JSON)
    ``{"trials": [{"trial_id", "kind", "rider", "pedestrian", "path" | "paths",
    "discomfort"?, "smoothing_window"?}, ...]}`` where ``rider`` and
    ``pedestrian`` are agent ids and paths are relative to the manifest.

Floats are written with 17 significant digits so every value round-trips.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__
from .errors import EmptyManifest, FormatError, InvalidInput
from .trajectory import ROLES, Trajectory, TrialAnalysis, TrialRecord, trajectories_by_agent

TRAJECTORY_HEADER = ("t", "agent_id", "x", "y")
RESULT_FIELDS = (
    "trial_id",
    "kind",
    "rider",
    "pedestrian",
    "min_ttc",
    "min_ttc_time",
    "pass_time",
    "discomfort_rider",
    "discomfort_pedestrian",
)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# trajectories

def trajectories_to_csv(trajectories: Iterable[Trajectory]) -> str:
    lines = [",".join(TRAJECTORY_HEADER)]
    for traj in trajectories:
        for t, (x, y) in zip(traj.t.tolist(), traj.xy.tolist()):
            lines.append(f"{fmt(t)},{traj.agent_id},{fmt(x)},{fmt(y)}")
    return "\n".join(lines) + "\n"


def write_trajectories(path, trajectories: Iterable[Trajectory]) -> None:
    atomic_write(path, trajectories_to_csv(trajectories))


def read_trajectories(path) -> dict[str, Trajectory]:
    """Parse a trajectory CSV into ``agent_id -> Trajectory`` (sorted by time)."""
    rows = defaultdict(list)
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not set(TRAJECTORY_HEADER) <= set(reader.fieldnames):
                raise FormatError(f"{path}: header must contain {','.join(TRAJECTORY_HEADER)}")
            for lineno, row in enumerate(reader, 2):
                try:
                    rows[row["agent_id"]].append((float(row["t"]), float(row["x"]), float(row["y"])))
                except (TypeError, ValueError) as exc:
                    raise FormatError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    try:
        return trajectories_by_agent(rows)
    except InvalidInput as exc:
        raise FormatError(f"{path}: {exc}") from exc


# trial manifests

def read_manifest(path) -> list[TrialRecord]:
    """Load every trial listed in a manifest, reading the trajectory files."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read manifest {path}: {exc}") from exc
    entries = doc.get("trials") if isinstance(doc, Mapping) else None
    if not isinstance(entries, list):
        raise FormatError(f"{path}: expected an object with a 'trials' list")
    if not entries:
        raise EmptyManifest(f"{path}: manifest lists no trials")
    cache: dict[Path, dict[str, Trajectory]] = {}
    trials = []
    for entry in entries:
        try:
            files = entry["paths"] if "paths" in entry else [entry["path"]]
            agents: dict[str, Trajectory] = {}
            for name in files:
                full = (path.parent / name).resolve()
                if full not in cache:
                    cache[full] = read_trajectories(full)
                agents.update(cache[full])
            rider, ped = agents[entry["rider"]], agents[entry["pedestrian"]]
            trials.append(
                TrialRecord(
                    trial_id=str(entry["trial_id"]),
                    kind=entry["kind"],
                    rider=rider,
                    pedestrian=ped,
                    reported_discomfort=entry.get("discomfort"),
                    smoothing_window=entry.get("smoothing_window"),
                )
            )
        except KeyError as exc:
            raise FormatError(f"{path}: trial entry {entry!r} is missing {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{path}: bad trial entry {entry!r}: {exc}") from exc
    return trials


def manifest_entry(trial: TrialRecord, csv_name: str) -> dict:
    entry = {
        "trial_id": trial.trial_id,
        "kind": trial.kind.value,
        "rider": trial.rider.agent_id,
        "pedestrian": trial.pedestrian.agent_id,
        "path": csv_name,
    }
    if trial.reported_discomfort is not None:
        entry["discomfort"] = dict(trial.reported_discomfort)
    if trial.smoothing_window is not None:
        entry["smoothing_window"] = trial.smoothing_window
    return entry


def write_trials(out_dir, trials: Sequence[TrialRecord], manifest_name: str = "manifest.json") -> Path:
    """One CSV per trial plus a manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for trial in trials:
        name = f"{trial.trial_id}.csv"
        write_trajectories(out_dir / name, [trial.rider, trial.pedestrian])
        entries.append(manifest_entry(trial, name))
    manifest = out_dir / manifest_name
    atomic_write(manifest, json.dumps({"trials": entries}, indent=2) + "\n")
    return manifest


# analysis results

def result_row(trial: TrialRecord, analysis: TrialAnalysis) -> dict:
    labels = trial.reported_discomfort or {}
    return {
        "trial_id": trial.trial_id,
        "kind": trial.kind.value,
        "rider": trial.rider.agent_id,
        "pedestrian": trial.pedestrian.agent_id,
        "min_ttc": fmt(analysis.min_ttc),
        "min_ttc_time": fmt(analysis.min_ttc_time),
        "pass_time": fmt(analysis.pass_time),
        **{f"discomfort_{role}": labels.get(role, "") for role in ROLES},
    }


def results_to_csv(rows: Iterable[Mapping]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RESULT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def read_rows(path) -> list[dict[str, str]]:
    try:
        with open(path, newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def read_points(path, role: str = "all") -> list[tuple[float, float]]:
    """``(min_ttc, discomfort)`` pairs from a points or results CSV.

    A plain ``discomfort`` column is used when present; otherwise the
    ``discomfort_<role>`` columns of a results file (``role="all"`` takes
    both). Empty cells are skipped.
    """
    rows = read_rows(path)
    if not rows:
        return []
    if "min_ttc" not in rows[0]:
        raise FormatError(f"{path}: missing min_ttc column")
    if "discomfort" in rows[0]:
        columns = ["discomfort"]
    elif role == "all":
        columns = [f"discomfort_{r}" for r in ROLES]
    elif role in ROLES:
        columns = [f"discomfort_{role}"]
    else:
        raise InvalidInput(f"unknown role {role!r}")
    missing = [c for c in columns if c not in rows[0]]
    if missing:
        raise FormatError(f"{path}: missing column(s) {', '.join(missing)}")
    points = []
    for lineno, row in enumerate(rows, 2):
        for col in columns:
            cell = (row.get(col) or "").strip()
            if not cell:
                continue
            try:
                points.append((float(row["min_ttc"]), float(cell)))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
    return points


def run_manifest(command: str, inputs: Sequence[str], parameters: Mapping) -> dict:
    return {
        "command": command,
        "inputs": [str(p) for p in inputs],
        "parameters": dict(parameters),
        "version": __version__,
    }


def write_run_manifest(path, command: str, inputs: Sequence[str], parameters: Mapping) -> None:
    atomic_write(path, json.dumps(run_manifest(command, inputs, parameters), indent=2, sort_keys=True) + "\n")
