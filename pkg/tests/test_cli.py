import json
import math
import shutil
import subprocess
import sys

import pytest
import yaml

from gyrowheel import UnknownChannelError, bundled_scenario_path
from gyrowheel.cli import emit_plot_data, main

from conftest import make_balance_mapping


def _write(tmp_path, name, mapping):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(mapping, sort_keys=False))
    return path


@pytest.fixture()
def quick_balance(tmp_path):
    # converges at t = 13.457 and stops there
    m = make_balance_mapping(t_end=20.0, stop_on_converged=True,
                             alpha_dot_floor=1e-8)
    return _write(tmp_path, "quick_balance.yaml", m)


@pytest.fixture()
def topple_case(tmp_path):
    m = make_balance_mapping(lean_offset=0.0, lean_rate=0.3, t_end=5.0)
    m["thresholds"]["topple_margin"] = 1.45
    return _write(tmp_path, "topple_case.yaml", m)


@pytest.fixture()
def inadmissible_case(tmp_path):
    return _write(
        tmp_path, "inadmissible.yaml", make_balance_mapping(lean_offset=1.5)
    )


def test_run_converged_writes_outputs(quick_balance, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(quick_balance), "--out", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "converged" in captured

    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header.startswith("t [s],alpha [rad],beta [rad]")

    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "converged"
    assert report["exit_code"] == 0
    assert report["terminal_event"]["kind"] == "Converged"
    assert report["terminal_event"]["time"] == pytest.approx(13.457, abs=1e-9)
    assert all(check["pass"] for check in report["thresholds"].values())
    assert report["certificate_decay"]["channel"] == "V"
    assert report["certificate_decay"]["fitted_rate"] == pytest.approx(-2.0, abs=0.01)

    # default balance plot channels, each with the t column first
    for channel in ("beta", "alpha_dot", "gamma_dot", "V"):
        plot = out / f"plot_{channel}.csv"
        assert plot.exists()
    first = (out / "plot_beta.csv").read_text().splitlines()
    assert first[0] == "t [s],beta [rad]"
    t0, beta0 = first[1].split(",")
    assert float(t0) == 0.0
    assert float(beta0) == pytest.approx(math.pi / 2 + 0.1, abs=1e-12)


def test_run_json_format(tmp_path):
    out = tmp_path / "out_json"
    code = main(
        ["run", str(bundled_scenario_path("p2p_default")), "--out", str(out),
         "--format", "json"]
    )
    assert code == 0
    doc = json.loads((out / "trajectory.json").read_text())
    assert doc["kind"] == "point_to_point"
    assert doc["mode"] == "velocity"
    assert doc["units"]["beta"] == "rad"
    assert doc["channels"]["x_a"][0] == 3.0
    assert doc["channels"]["y_a"][0] == 4.0
    # the path ends at the target within the stop threshold
    assert math.hypot(doc["channels"]["x_a"][-1], doc["channels"]["y_a"][-1]) < 0.05
    assert not (out / "trajectory.csv").exists()


def test_run_horizon_exit(quick_balance, tmp_path):
    out = tmp_path / "short"
    code = main(["run", str(quick_balance), "--out", str(out), "--t-end", "2.0"])
    assert code == 1
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "horizon"
    assert report["rows"] == 2001


def test_run_toppled_exit(topple_case, tmp_path):
    out = tmp_path / "tipped"
    assert main(["run", str(topple_case), "--out", str(out)]) == 2
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "toppled"
    assert report["terminal_event"]["kind"] == "Toppled"
    assert report["final_time"] == pytest.approx(0.466, abs=1e-9)


def test_run_inadmissible_exit(inadmissible_case, tmp_path):
    out = tmp_path / "rejected"
    assert main(["run", str(inadmissible_case), "--out", str(out)]) == 3
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "inadmissible"
    assert report["rows"] == 0
    assert report["events"][0]["kind"] == "DomainExit"
    assert "sigma" in report["events"][0]["detail"]
    assert not (out / "trajectory.csv").exists()


def test_run_config_error_exits(tmp_path, capsys):
    bad = tmp_path / "broken.yaml"
    bad.write_text("kind: [unclosed\n")
    assert main(["run", str(bad)]) == 4
    assert "error" in capsys.readouterr().err

    gains = make_balance_mapping()
    gains["kind"] = "point_to_point"
    gains["target"] = {"x": 0.0, "y": 0.0}
    gains["initial"] = {"x_a": 3.0, "y_a": 4.0, "alpha": 0.9}
    gains["gains"] = {"k3": 1.0, "k4": 1.0}
    bad_gain = _write(tmp_path, "bad_gain.yaml", gains)
    assert main(["run", str(bad_gain)]) == 4
    assert "k3 > 2" in capsys.readouterr().err

    assert main(["run", str(tmp_path / "missing.yaml")]) == 4


def test_run_dt_override(quick_balance, tmp_path):
    out = tmp_path / "coarse"
    code = main(
        ["run", str(quick_balance), "--out", str(out), "--dt", "0.01",
         "--t-end", "1.0"]
    )
    assert code == 1
    report = json.loads((out / "report.json").read_text())
    assert report["rows"] == 101
    assert report["dt"] == 0.01


def test_validate_accepts_bundled(capsys):
    for name in ("balance_default", "p2p_default", "line_5m", "corridor_demo"):
        assert main(["validate", str(bundled_scenario_path(name))]) == 0
        assert "OK" in capsys.readouterr().out


def test_validate_flags_inadmissible(inadmissible_case, capsys):
    assert main(["validate", str(inadmissible_case)]) == 3
    assert "sigma" in capsys.readouterr().err


def test_validate_flags_config_error(tmp_path, capsys):
    bad = tmp_path / "nonsense.yaml"
    bad.write_text("42\n")
    assert main(["validate", str(bad)]) == 4
    assert "invalid" in capsys.readouterr().err


def test_batch_runs_all_and_returns_worst(quick_balance, topple_case, tmp_path, capsys):
    batch_dir = tmp_path / "suite"
    batch_dir.mkdir()
    shutil.copy(quick_balance, batch_dir / "a_quick.yaml")
    shutil.copy(topple_case, batch_dir / "b_topple.yaml")
    out = tmp_path / "batch_out"
    assert main(["batch", str(batch_dir), "--out", str(out)]) == 2
    assert (out / "a_quick" / "report.json").exists()
    assert (out / "b_topple" / "report.json").exists()
    printed = capsys.readouterr().out
    assert "converged" in printed and "toppled" in printed


def test_batch_rejects_missing_dir(tmp_path, capsys):
    assert main(["batch", str(tmp_path / "nowhere")]) == 4
    assert "error" in capsys.readouterr().err


def test_batch_empty_dir(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["batch", str(empty)]) == 4


def test_list_channels(capsys):
    assert main(["list-channels"]) == 0
    out = capsys.readouterr().out
    assert "beta" in out
    assert "rad" in out
    assert "u_steer" in out


def test_emit_plot_data_unknown_channel(balance_traj_5s, tmp_path):
    with pytest.raises(UnknownChannelError) as exc:
        emit_plot_data(balance_traj_5s, ["bogus"], tmp_path)
    msg = str(exc.value)
    assert "bogus" in msg and "beta" in msg


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-c", "import sys; from gyrowheel.cli import main; sys.exit(main(['list-channels']))"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert "beta" in proc.stdout
