"""Command-line front end.

    lieplan run --robot ur5e_husky --path vertical_helix --out results/
    lieplan run --all --out results/ --jobs 3
    lieplan validate my_robot.json
    lieplan report results/ur5e_husky__vertical_helix/trace.csv

Robot and path arguments are file paths or the stems of bundled files.
Planner settings resolve per field as: command line, then the robot file's
``planner`` section (lambda_e, lambda_j, lambda_v, max_iterations) and the
path file (dt, duration), then the built-in defaults.

Exit codes: 0 success, 1 validation failures, 2 unreadable or malformed
input, 3 configuration that does not fit the robot.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import assets
from .kinematics import RobotDescriptionError, check_robot_dict, robot_from_dict
from .metrics import BASE_SOURCES, build_report, report_to_json, report_to_text
from .paths import PathError, params_from_dict, sample
from .planner import DimensionMismatchError, PlannerConfig
from .simulator import TraceFormatError, read_trace_csv, run, table_from_trace, write_trace_csv

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_DIMENSION = 0, 1, 2, 3
ROBOT_FILE_FIELDS = ("lambda_e", "lambda_j", "lambda_v", "max_iterations")
PATH_FILE_FIELDS = ("dt", "duration")


class InputError(Exception):
    pass


@dataclass
class RunManifest:
    robots: list[Path]
    paths: list[Path]
    overrides: dict = field(default_factory=dict)
    out: Path = Path("results")
    jobs: int = 1

    def pairs(self) -> list[tuple[Path, Path]]:
        return [(r, p) for r in self.robots for p in self.paths]


def _read_json(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def resolve_settings(overrides: dict, robot_doc: dict, path_doc: dict) -> tuple[dict, dict]:
    """Merge planner/path settings; returns (values, source of each value)."""
    defaults = PlannerConfig()
    values, source = {}, {}
    file_values = dict(robot_doc.get("planner", {}))
    file_values.update({k: path_doc[k] for k in PATH_FILE_FIELDS if k in path_doc})
    for name in ROBOT_FILE_FIELDS + PATH_FILE_FIELDS:
        if overrides.get(name) is not None:
            values[name], source[name] = overrides[name], "cli"
        elif name in file_values:
            values[name], source[name] = file_values[name], "file"
        else:
            values[name] = getattr(defaults, name) if hasattr(defaults, name) else None
            source[name] = "default"
    if values["duration"] is None:
        values["duration"] = 20.0
    return values, source


def prepare(robot_file: Path, path_file: Path, overrides: dict):
    """Load and check one (robot, path) pair; raises InputError or DimensionMismatchError."""
    robot_doc, path_doc = _read_json(robot_file), _read_json(path_file)
    # planner weights are checked against the model below, as a dimension error
    geometry = {k: v for k, v in robot_doc.items() if k != "planner"}
    try:
        m = robot_from_dict(geometry)
        params = params_from_dict(path_doc)
    except (RobotDescriptionError, PathError) as exc:
        raise InputError(str(exc)) from exc
    values, _ = resolve_settings(overrides, robot_doc, path_doc)
    lam = values["lambda_v"]
    cfg = PlannerConfig(
        lambda_e=float(values["lambda_e"]),
        lambda_v=None if lam is None else tuple(float(x) for x in lam),
        lambda_j=float(values["lambda_j"]),
        dt=float(values["dt"]),
        max_iterations=int(values["max_iterations"]),
    ).for_model(m)
    try:
        path = sample(params, cfg.dt, float(values["duration"]))
    except PathError as exc:
        raise InputError(str(exc)) from exc
    return m, path, cfg


def run_dir_name(robot_file: Path, path_file: Path) -> str:
    return f"{Path(robot_file).stem}__{Path(path_file).stem}"


def execute(robot_file: Path, path_file: Path, overrides: dict, out: Path) -> str:
    """Run one experiment and write its artifacts; returns the report text."""
    m, path, cfg = prepare(robot_file, path_file, overrides)
    result = run(m, path, cfg)
    target = Path(out) / run_dir_name(robot_file, path_file)
    target.mkdir(parents=True, exist_ok=True)
    trace_file = target / "trace.csv"
    write_trace_csv(table_from_trace(result.trace), trace_file)
    # the report is computed from the file so `report` reproduces it exactly
    report = build_report(read_trace_csv(trace_file), m.base_channels)
    text = report_to_text(report)
    (target / "report.json").write_text(report_to_json(report))
    (target / "report.txt").write_text(text)
    return text


def _execute_job(job) -> tuple[str, str]:
    robot_file, path_file, overrides, out = job
    return run_dir_name(robot_file, path_file), execute(robot_file, path_file, overrides, out)


def cmd_run(manifest: RunManifest) -> int:
    # every input is loaded and checked before the first run starts
    try:
        for r, p in manifest.pairs():
            prepare(r, p, manifest.overrides)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DimensionMismatchError as exc:
        print("error: planner configuration does not fit the robot:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  {problem}", file=sys.stderr)
        return EXIT_DIMENSION

    jobs = [(r, p, manifest.overrides, manifest.out) for r, p in manifest.pairs()]
    if manifest.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=manifest.jobs) as pool:
            results = list(pool.map(_execute_job, jobs))
    else:
        results = [_execute_job(j) for j in jobs]
    for name, text in results:
        print(f"== {name}")
        print(text, end="")
    return EXIT_OK


def cmd_validate(robot_file: Path) -> int:
    try:
        checks = check_robot_dict(_read_json(robot_file))
    except (InputError, RobotDescriptionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for item, ok, msg in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {item}: {msg}")
    passed = all(ok for _, ok, _ in checks)
    print("valid" if passed else "invalid")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_report(trace_file: Path, robot_file: Path | None = None, base_source: str = "commanded") -> int:
    try:
        table = read_trace_csv(trace_file)
    except OSError as exc:
        print(f"error: {trace_file}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_INPUT
    except TraceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if len(table) == 0:
        print(f"error: {trace_file}: trace has no rows", file=sys.stderr)
        return EXIT_INPUT
    d = table.inputs.shape[1]
    if robot_file is not None:
        try:
            m = robot_from_dict(_read_json(robot_file))
        except (InputError, RobotDescriptionError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if m.input_dim != d:
            print(f"error: trace has {d} input columns but robot '{m.name}' expects {m.input_dim}",
                  file=sys.stderr)
            return EXIT_DIMENSION
        channels = m.base_channels
    else:
        channels = d - 6  # six-joint arm unless a robot file says otherwise
        if channels not in (0, 2, 3):
            print(f"error: cannot infer the base from {d} input columns; pass --robot", file=sys.stderr)
            return EXIT_INPUT
    print(report_to_text(build_report(table, channels, base_source)), end="")
    return EXIT_OK


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lieplan", description="Step-wise mobile-manipulator planner.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run experiments and write traces and reports")
    r.add_argument("--robot", help="robot description file or bundled name")
    r.add_argument("--path", help="path config file or bundled name")
    r.add_argument("--all", action="store_true", help="every bundled robot on every bundled path")
    r.add_argument("--out", default="results", help="output directory")
    r.add_argument("--dt", type=float)
    r.add_argument("--duration", type=float)
    r.add_argument("--lambda-e", type=float)
    r.add_argument("--lambda-j", type=float)
    r.add_argument("--lambda-v", type=_float_list)
    r.add_argument("--max-iters", type=int)
    r.add_argument("--jobs", type=int, default=1)

    v = sub.add_parser("validate", help="check a robot description file")
    v.add_argument("robot")

    p = sub.add_parser("report", help="recompute the metrics table from a trace")
    p.add_argument("trace")
    p.add_argument("--robot", help="robot description (otherwise the base is inferred)")
    p.add_argument("--base-source", choices=BASE_SOURCES, default="commanded")
    return ap


def manifest_from_args(args) -> RunManifest:
    if args.all:
        robots = [assets.resolve(n, "robots") for n in assets.ROBOTS]
        paths = [assets.resolve(n, "paths") for n in assets.PATHS]
    else:
        if not (args.robot and args.path):
            raise InputError("run needs --robot and --path, or --all")
        robots, paths = [assets.resolve(args.robot, "robots")], [assets.resolve(args.path, "paths")]
    overrides = {"dt": args.dt, "duration": args.duration, "lambda_e": args.lambda_e,
                 "lambda_j": args.lambda_j, "lambda_v": args.lambda_v, "max_iterations": args.max_iters}
    return RunManifest(robots, paths, {k: v for k, v in overrides.items() if v is not None},
                       Path(args.out), max(1, args.jobs))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        try:
            manifest = manifest_from_args(args)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        return cmd_run(manifest)
    if args.command == "validate":
        return cmd_validate(assets.resolve(args.robot, "robots"))
    robot = assets.resolve(args.robot, "robots") if args.robot else None
    return cmd_report(Path(args.trace), robot, args.base_source)


if __name__ == "__main__":
    sys.exit(main())
