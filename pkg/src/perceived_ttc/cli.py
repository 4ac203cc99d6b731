"""``perceived-ttc`` command line tool.

Subcommands: analyze, fit, estimate, stats, simulate, stream. Every file
output gets a ``<output>.run.json`` sidecar recording the command, inputs,
parameters and tool version (``simulate`` embeds it in its manifest).
Errors are reported on stderr as one JSON object and map to distinct exit
codes (see :mod:`perceived_ttc.errors`).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from . import formats
from . import stats as stats_mod
from .calibration import CalibrationModel, FitKind, classify_correlation, estimate, fit
from .errors import FormatError, InvalidSpec, PerceivedTtcError
from .scenario import DEFAULT_SCENARIOS, ENSEMBLE_JITTER, LabelModel, ScenarioSpec, simulate_ensemble
from .stream import DEFAULT_STALENESS, StreamEstimator, run_line_protocol
from .trajectory import analyze_trial

DEFAULT_SMOOTHING = 0.25  # s, used when neither the flag nor the manifest sets one
CURVE_POINTS = 200


def _sidecar(out: Path) -> Path:
    return out.with_name(out.name + ".run.json")


def _load_model(path) -> CalibrationModel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read model {path}: {exc}") from exc
    return CalibrationModel.from_json(text)


def cmd_analyze(args) -> int:
    trials = formats.read_manifest(args.trials)
    rows = []
    for trial in sorted(trials, key=lambda tr: tr.trial_id):
        if args.smoothing is not None:
            window = args.smoothing
        elif trial.smoothing_window is not None:
            window = trial.smoothing_window
        else:
            window = DEFAULT_SMOOTHING
        try:
            analysis = analyze_trial(trial, window)
        except PerceivedTtcError as exc:
            raise type(exc)(f"trial {trial.trial_id}: {exc}") from exc
        rows.append(formats.result_row(trial, analysis))
    out = Path(args.out)
    formats.atomic_write(out, formats.results_to_csv(rows))
    formats.write_run_manifest(
        _sidecar(out), "analyze", [args.trials],
        {"smoothing": args.smoothing, "default_smoothing": DEFAULT_SMOOTHING, "out": str(out)},
    )
    return 0


def cmd_fit(args) -> int:
    points = formats.read_points(args.data, args.role)
    model = fit(points, args.model)
    out = Path(args.out)
    formats.atomic_write(out, model.to_json() + "\n")
    params = {"model": model.kind.value, "role": args.role, "out": str(out)}
    if args.curve:
        xs = [p[0] for p in points]
        lo, hi = min(xs), max(xs)
        grid = [lo + (hi - lo) * k / (CURVE_POINTS - 1) for k in range(CURVE_POINTS)]
        lines = ["ttc,discomfort"] + [f"{formats.fmt(x)},{formats.fmt(y)}" for x, y in zip(grid, model.predict(grid))]
        formats.atomic_write(args.curve, "\n".join(lines) + "\n")
        params["curve"] = str(args.curve)
    formats.write_run_manifest(_sidecar(out), "fit", [args.data], params)
    summary = model.to_dict()
    summary["correlation"] = classify_correlation(model.r2).value
    print(json.dumps(summary))
    return 0


def cmd_estimate(args) -> int:
    model = _load_model(args.model)
    raw, clamped = estimate(model, args.ttc)
    print(json.dumps({
        "ttc": args.ttc,
        "raw": raw,
        "clamped": clamped,
        "run": formats.run_manifest("estimate", [args.model], {"ttc": args.ttc}),
    }))
    return 0


def cmd_stats(args) -> int:
    rows = formats.read_rows(args.data)
    if rows and args.group_by not in rows[0]:
        raise FormatError(f"{args.data}: no column {args.group_by!r} to group by")
    try:
        pairs = [(row[args.group_by], float(row["min_ttc"])) for row in rows]
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{args.data}: bad min_ttc value ({exc})") from exc
    groups = stats_mod.group_by(pairs)
    out = Path(args.out)
    formats.atomic_write(out, stats_mod.to_json(groups) + "\n")
    params = {"group_by": args.group_by, "out": str(out)}
    if args.csv:
        formats.atomic_write(args.csv, stats_mod.to_csv(groups))
        params["csv"] = str(args.csv)
    formats.write_run_manifest(_sidecar(out), "stats", [args.data], params)
    return 0


def _parse_simulation(doc: Mapping):
    """Scenario list, jitter, sets, label model and seed from a spec document."""
    if not isinstance(doc, Mapping):
        raise InvalidSpec("simulation spec must be a JSON object")
    if "kind" in doc:
        doc = {"scenarios": [doc]}
    if doc.get("preset") == "default":
        scenarios = list(DEFAULT_SCENARIOS)
        jitter = doc.get("jitter", list(ENSEMBLE_JITTER))
        sets = doc.get("sets", 10)
    elif "preset" in doc:
        raise InvalidSpec(f"unknown preset {doc['preset']!r}")
    else:
        if not doc.get("scenarios"):
            raise InvalidSpec("simulation spec needs 'scenarios', 'kind' or 'preset'")
        scenarios = [ScenarioSpec.from_dict(s) for s in doc["scenarios"]]
        jitter = doc.get("jitter")
        sets = doc.get("sets", 1)
    label = doc.get("label_model")
    label_model = None if label is None else LabelModel.from_dict(label)
    return scenarios, jitter, int(sets), label_model, int(doc.get("seed", 0))


def cmd_simulate(args) -> int:
    try:
        doc = json.loads(Path(args.spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read spec {args.spec}: {exc}") from exc
    scenarios, jitter, sets, label_model, seed = _parse_simulation(doc)
    if args.seed is not None:
        seed = args.seed
    if args.n < 0:
        raise InvalidSpec("--n must be >= 0")
    trials = simulate_ensemble(scenarios, args.n, seed=seed, jitter=jitter, sets=sets, label_model=label_model)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = formats.write_trials(out, trials)
    # embed the run record rather than adding a file next to the trials
    body = json.loads(manifest.read_text())
    body["run"] = formats.run_manifest(
        "simulate", [args.spec],
        {"n": args.n, "seed": seed, "sets": sets, "scenarios": [s.to_dict() for s in scenarios],
         "jitter": jitter, "label_model": None if label_model is None else label_model.to_dict()},
    )
    formats.atomic_write(manifest, json.dumps(body, indent=2) + "\n")
    return 0


def cmd_stream(args) -> int:
    model = _load_model(args.model)
    estimator = StreamEstimator(model, threshold=args.threshold, staleness=args.staleness)
    if args.run_manifest:
        formats.write_run_manifest(
            args.run_manifest, "stream", [args.model],
            {"threshold": args.threshold, "staleness": args.staleness},
        )
    run_line_protocol(estimator, sys.stdin, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perceived-ttc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="minimum perceived TTC per trial")
    p.add_argument("--trials", required=True, help="trial manifest (JSON)")
    p.add_argument("--out", required=True, help="results CSV")
    p.add_argument("--smoothing", type=float, default=None,
                   help=f"velocity smoothing window in s (default: per trial, else {DEFAULT_SMOOTHING})")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fit", help="fit a discomfort-vs-TTC curve")
    p.add_argument("--data", required=True, help="points CSV (min_ttc,discomfort) or analyze results")
    p.add_argument("--model", required=True, choices=[k.value for k in FitKind])
    p.add_argument("--out", required=True, help="model JSON")
    p.add_argument("--role", default="all", choices=["all", "rider", "pedestrian"],
                   help="label column(s) to use from a results CSV")
    p.add_argument("--curve", help="optional CSV of fitted-curve samples for plotting")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("estimate", help="discomfort for one perceived TTC")
    p.add_argument("--model", required=True)
    p.add_argument("--ttc", required=True, type=float)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("stats", help="grouped box-plot statistics of min TTC")
    p.add_argument("--data", required=True, help="analyze results CSV")
    p.add_argument("--group-by", required=True, choices=["kind", "rider"])
    p.add_argument("--out", required=True, help="box stats JSON")
    p.add_argument("--csv", help="optional box stats CSV")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("simulate", help="generate synthetic trials")
    p.add_argument("--spec", required=True, help="scenario spec JSON")
    p.add_argument("--n", required=True, type=int, help="trials per scenario")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the spec's seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stream", help="JSON-lines filter: agent updates in, comfort events out")
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", required=True, type=float)
    p.add_argument("--staleness", type=float, default=DEFAULT_STALENESS)
    p.add_argument("--run-manifest", help="where to write the run record")
    p.set_defaults(func=cmd_stream)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PerceivedTtcError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}),
              file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
