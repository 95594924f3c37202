import json

import numpy as np
import pytest

from cfrobust.cli import main
from cfrobust.harness import CSV_COLUMNS, read_results

SMALL = ["--set", "network.num_aps=4", "--set", "network.num_ues=10",
         "--set", "network.num_scheduled=3", "--snr", "0", "10", "--trials", "2"]


def test_run_csv_to_file(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["run", *SMALL, "--out", str(out)]) == 0
    rows = read_results(out)
    assert len(rows) == 6 and {r.snr_db for r in rows} == {0.0, 10.0}
    assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_run_stdout_json(capsys):
    assert main(["run", *SMALL, "--format", "json", "--pairing", "c_esg:zf:rgdpa:imperfect"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert [d["pairing"] for d in data] == ["c_esg/zf/rgdpa/icsi0.15"] * 2


def test_run_seed_changes_results(tmp_path):
    a, b, c = (tmp_path / f"{x}.json" for x in "abc")
    main(["run", *SMALL, "--seed", "1", "--format", "json", "--out", str(a)])
    main(["run", *SMALL, "--seed", "1", "--format", "json", "--out", str(b)])
    main(["run", *SMALL, "--seed", "2", "--format", "json", "--out", str(c)])
    strip = lambda p: [r.mean_sum_rate for r in read_results(p)]  # noqa: E731
    assert strip(a) == strip(b) != strip(c)


def test_run_config_file_experiment_section(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "network": {"num_aps": 4, "num_ues": 10, "num_scheduled": 3},
        "experiment": {"snr_grid_db": [5], "trials": 1, "alpha": 0.2,
                       "pairings": ["rc_esg:mmse:epl:imperfect"]},
    }))
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_results(out)
    assert [(r.pairing, r.snr_db, r.trials) for r in rows] == [("rc_esg/mmse/epl/icsi0.2", 5.0, 1)]


def test_dump_channel(tmp_path):
    snap = tmp_path / "snap.npz"
    assert main(["run", *SMALL, "--out", str(tmp_path / "r.csv"), "--dump-channel", str(snap)]) == 0
    data = np.load(snap)
    assert data["beta"].shape == (16, 10) and data["mask"].dtype == bool


@pytest.mark.parametrize("args", [
    ["run", "--set", "network.num_scheduled=0"],
    ["run", "--set", "bounds.alpha_lo=0.4"],
    ["run", "--set", "network.bogus=1"],
    ["run", "--pairing", "c_esg:mmse:wrgdpa:imperfect"],
])
def test_config_errors_exit_2(args, capsys):
    assert main(args) == 2
    assert "config error" in capsys.readouterr().err


def test_bad_json_file(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert main(["run", "--config", str(cfg)]) == 2


def test_unknown_experiment_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": {"trails": 3}}))
    assert main(["run", "--config", str(cfg)]) == 2


def test_config_command(capsys):
    assert main(["config", "--set", "solver.mc_samples=500"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["solver"]["mc_samples"] == 500
    assert data["network"]["num_aps"] == 16


def test_verify_subset(tmp_path, capsys):
    report = tmp_path / "v.json"
    assert main(["verify", "--only", "8,11", "--json", str(report)]) == 0
    out = capsys.readouterr().out
    assert "[PASS] criterion  8" in out and "2/2 criteria passed" in out
    assert [r["criterion"] for r in json.loads(report.read_text())] == [8, 11]


def test_fixed_step_runs(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["run", *SMALL, "--fixed-step", "--pairing", "c_esg:zf:gdpa:imperfect",
                 "--out", str(out)]) == 0
