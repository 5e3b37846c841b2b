"""Command-line harness: run scenario files, write trajectories, reports, plot data.

Exit codes are a stable contract:

    0  run converged
    1  horizon reached (or steering went singular) without convergence
    2  wheel toppled
    3  inadmissible initial state
    4  configuration or I/O error

Outputs per run: ``trajectory.csv`` (or ``.json``), ``report.json``, and one
``plot_<channel>.csv`` per requested channel. All trajectory and plot files
are bitwise deterministic for a given scenario.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

from .lyapunov import decay_monitor
from .scenario import Scenario, ScenarioError, parse_scenario
from .simulate import (
    CHANNEL_INFO,
    Event,
    InadmissibleStateError,
    NonFiniteStateError,
    Trajectory,
    UnknownChannelError,
    run_closed_loop,
)

__all__ = [
    "EXIT_CONVERGED",
    "EXIT_NO_CONVERGENCE",
    "EXIT_TOPPLED",
    "EXIT_INADMISSIBLE",
    "EXIT_CONFIG",
    "write_trajectory_csv",
    "write_trajectory_json",
    "emit_plot_data",
    "build_report",
    "run_scenario",
    "main",
]

EXIT_CONVERGED = 0
EXIT_NO_CONVERGENCE = 1
EXIT_TOPPLED = 2
EXIT_INADMISSIBLE = 3
EXIT_CONFIG = 4


def _header_cell(name: str) -> str:
    unit = CHANNEL_INFO[name][0]
    return f"{name} [{unit}]"


def write_trajectory_csv(traj: Trajectory, path: Path) -> None:
    """Plain columnar text; floats via repr so repeat runs are bitwise identical."""
    names = traj.names
    cols = [traj.channels[n] for n in names]
    lines = [",".join(_header_cell(n) for n in names)]
    for i in range(traj.row_count):
        lines.append(",".join(repr(col[i]) for col in cols))
    path.write_text("\n".join(lines) + "\n")


def _state_dict(state) -> dict:
    return {
        "alpha": state.alpha,
        "beta": state.beta,
        "gamma": state.gamma,
        "alpha_dot": state.alpha_dot,
        "beta_dot": state.beta_dot,
        "gamma_dot": state.gamma_dot,
        "x_a": state.x_a,
        "y_a": state.y_a,
    }


def _event_dict(ev: Event) -> dict:
    return {"kind": ev.kind, "time": ev.time, "detail": ev.detail}


def write_trajectory_json(traj: Trajectory, path: Path) -> None:
    doc = {
        "kind": traj.kind,
        "mode": traj.mode,
        "names": list(traj.names),
        "units": {n: CHANNEL_INFO[n][0] for n in traj.names},
        "channels": {n: traj.channels[n] for n in traj.names},
        "events": [_event_dict(ev) for ev in traj.events],
        "final_state": _state_dict(traj.final_state) if traj.final_state else None,
    }
    path.write_text(json.dumps(doc, indent=2, allow_nan=True) + "\n")


def emit_plot_data(traj: Trajectory, channels, out_dir: Path) -> list[Path]:
    """One two-column (t, channel) csv per requested channel.

    Raises UnknownChannelError, listing the valid names, if a channel does
    not exist in this trajectory.
    """
    out_dir = Path(out_dir)
    paths = []
    times = traj.times
    for name in channels:
        col = traj.channel(name)
        lines = [f"{_header_cell('t')},{_header_cell(name)}"]
        for i in range(traj.row_count):
            lines.append(f"{times[i]!r},{col[i]!r}")
        path = out_dir / f"plot_{name}.csv"
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    return paths


def _status_and_exit(traj: Trajectory) -> tuple[str, int]:
    terminal = traj.terminal_event
    if terminal is not None and terminal.kind == "Toppled":
        return "toppled", EXIT_TOPPLED
    if traj.converged:
        return "converged", EXIT_CONVERGED
    if terminal is not None and terminal.kind == "SingularSteering":
        return "singular_steering", EXIT_NO_CONVERGENCE
    return "horizon", EXIT_NO_CONVERGENCE


def _threshold_checks(sc: Scenario, traj: Trajectory) -> dict:
    cfg = sc.config
    thr = cfg.thresholds
    final = traj.final_state
    out = {}

    def entry(value, limit):
        return {"value": value, "limit": limit, "pass": bool(value <= limit)}

    if cfg.kind == "balance":
        out["lean"] = entry(abs(final.beta - math.pi / 2.0), thr.lean)
        out["lean_rate"] = entry(abs(final.beta_dot), thr.lean_rate)
        out["steer_rate"] = entry(abs(final.alpha_dot), thr.steer_rate)
        out["roll_rate"] = entry(abs(final.gamma_dot), thr.roll_rate)
    elif cfg.kind == "point_to_point":
        e = traj.channels["e"][-1] if traj.row_count else math.nan
        out["distance"] = entry(e, thr.distance)
    else:
        d = traj.channels["d"][-1] if traj.row_count else math.nan
        e = traj.channels["e"][-1] if traj.row_count else math.nan
        out["distance"] = entry(d, thr.distance)
        out["line_offset"] = entry(e, thr.line_offset)
    return out


def _decay_summary(traj: Trajectory) -> dict | None:
    name = "V" if traj.kind == "balance" else "V1"
    values = traj.channels.get(name)
    if not values:
        return None
    finite_t, finite_v = [], []
    for t, v in zip(traj.times, values):
        if math.isfinite(v):
            finite_t.append(t)
            finite_v.append(v)
    if not finite_v:
        return None
    report = decay_monitor(finite_t, finite_v)
    summary = report.summary()
    summary["channel"] = name
    return summary


def build_report(
    sc: Scenario,
    traj: Trajectory | None,
    status: str,
    exit_code: int,
    wall_time_s: float,
    detail: str = "",
) -> dict:
    cfg = sc.config
    report = {
        "scenario": sc.name,
        "kind": cfg.kind,
        "mode": cfg.mode,
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "status": status,
        "exit_code": exit_code,
        "wall_time_s": wall_time_s,
    }
    if detail:
        report["detail"] = detail
    if traj is None:
        report["rows"] = 0
        report["events"] = [
            {"kind": "DomainExit", "time": 0.0, "detail": detail}
        ]
        report["terminal_event"] = report["events"][0]
        report["final_state"] = _state_dict(cfg.initial)
        return report
    report["rows"] = traj.row_count
    report["final_time"] = traj.times[-1] if traj.row_count else None
    report["events"] = [_event_dict(ev) for ev in traj.events]
    terminal = traj.terminal_event
    report["terminal_event"] = _event_dict(terminal) if terminal else None
    report["final_state"] = _state_dict(traj.final_state)
    report["thresholds"] = _threshold_checks(sc, traj)
    report["certificate_decay"] = _decay_summary(traj)
    return report


def run_scenario(sc: Scenario, out_dir, fmt: str = "csv") -> tuple[int, dict]:
    """Run one scenario, write trajectory/report/plot files, return (exit code, report)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    try:
        traj = run_closed_loop(sc.config)
    except InadmissibleStateError as exc:
        wall = time.perf_counter() - start
        report = build_report(sc, None, "inadmissible", EXIT_INADMISSIBLE, wall, str(exc))
        _write_report(report, out_dir)
        return EXIT_INADMISSIBLE, report
    except NonFiniteStateError as exc:
        wall = time.perf_counter() - start
        report = build_report(sc, None, "non_finite", EXIT_NO_CONVERGENCE, wall, str(exc))
        _write_report(report, out_dir)
        return EXIT_NO_CONVERGENCE, report
    wall = time.perf_counter() - start

    if fmt == "json":
        write_trajectory_json(traj, out_dir / "trajectory.json")
    else:
        write_trajectory_csv(traj, out_dir / "trajectory.csv")
    emit_plot_data(traj, sc.plot_channels, out_dir)

    status, exit_code = _status_and_exit(traj)
    report = build_report(sc, traj, status, exit_code, wall)
    _write_report(report, out_dir)
    return exit_code, report


def _write_report(report: dict, out_dir: Path) -> None:
    (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")


def _apply_overrides(sc: Scenario, args) -> Scenario:
    cfg = sc.config
    changes = {}
    if args.dt is not None:
        changes["dt"] = args.dt
    if args.t_end is not None:
        changes["t_end"] = args.t_end
    if changes:
        cfg = replace(cfg, **changes)
    return replace(sc, config=cfg)


def _summarize(report: dict) -> str:
    bits = [
        f"{report['scenario']}: {report['status']}",
        f"rows={report.get('rows', 0)}",
    ]
    terminal = report.get("terminal_event")
    if terminal:
        bits.append(f"{terminal['kind']} at t={terminal['time']:.3f}")
    bits.append(f"exit={report['exit_code']}")
    return "  ".join(bits)


def _cmd_run(args) -> int:
    try:
        sc = parse_scenario(args.scenario)
        sc = _apply_overrides(sc, args)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out) if args.out else Path("runs") / sc.name
    try:
        exit_code, report = run_scenario(sc, out_dir, args.format)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(_summarize(report))
    print(f"wrote {out_dir}")
    return exit_code


def _cmd_batch(args) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        print(f"error: {root} is not a directory", file=sys.stderr)
        return EXIT_CONFIG
    files = sorted(p for p in root.iterdir() if p.suffix in (".yaml", ".yml"))
    if not files:
        print(f"error: no scenario files in {root}", file=sys.stderr)
        return EXIT_CONFIG
    out_root = Path(args.out) if args.out else Path("runs")
    worst = 0
    for path in files:
        try:
            sc = parse_scenario(path)
        except ScenarioError as exc:
            print(f"{path.name}: config error: {exc}")
            worst = max(worst, EXIT_CONFIG)
            continue
        try:
            # key by file stem: scenario names need not be unique across files
            exit_code, report = run_scenario(sc, out_root / path.stem, args.format)
        except OSError as exc:
            print(f"{path.name}: i/o error: {exc}")
            worst = max(worst, EXIT_CONFIG)
            continue
        print(_summarize(report))
        worst = max(worst, exit_code)
    return worst


def _cmd_validate(args) -> int:
    from .simulate import _admissibility_violation

    try:
        sc = parse_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    violation = _admissibility_violation(sc.config)
    cfg = sc.config
    print(
        f"OK {sc.name}: kind={cfg.kind} mode={cfg.mode} dt={cfg.dt} "
        f"t_end={cfg.t_end} rows<={cfg.n_steps + 1}"
    )
    if violation is not None:
        print(f"inadmissible initial state: {violation}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    return EXIT_CONVERGED


def _cmd_list_channels(_args) -> int:
    for name, (unit, desc) in CHANNEL_INFO.items():
        print(f"{name:10s} [{unit:15s}] {desc}")
    return EXIT_CONVERGED


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gyrowheel",
        description="Deterministic closed-loop simulation runner for the "
        "single-wheel robot controllers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("scenario", help="path to a scenario file")
    p_run.add_argument("--out", help="output directory (default runs/<name>)")
    p_run.add_argument("--dt", type=float, default=None, help="override step size")
    p_run.add_argument("--t-end", type=float, default=None, help="override horizon")
    p_run.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="trajectory file format")
    p_run.set_defaults(func=_cmd_run)

    p_batch = sub.add_parser("batch", help="run every scenario file in a directory")
    p_batch.add_argument("directory", help="directory of scenario files")
    p_batch.add_argument("--out", help="output root (default runs/)")
    p_batch.add_argument("--format", choices=("csv", "json"), default="csv")
    p_batch.set_defaults(func=_cmd_batch)

    p_val = sub.add_parser("validate", help="check a scenario file without running it")
    p_val.add_argument("scenario", help="path to a scenario file")
    p_val.set_defaults(func=_cmd_validate)

    p_list = sub.add_parser("list-channels", help="list trajectory channels")
    p_list.set_defaults(func=_cmd_list_channels)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
