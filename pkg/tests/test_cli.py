import csv
import json

import numpy as np
import pytest

import twoshock.functionals as fn
from twoshock.cli import main
from twoshock.config import ConfigError, PRESETS, load_config, preset, validate


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_presets_validate():
    for name in PRESETS:
        cfg = validate(preset(name))
        assert cfg.fan.eps1 / cfg.lam <= 1


@pytest.mark.parametrize("bad", [
    {"lambda": 0.05},                               # eps / lambda > 1
    {"lambda": 1.0},
    {"fan": {"eps1": -0.1}},
    {"grid": {"x_min": -20.0, "x_max": 20.0}},      # layers do not fit
    {"grid": {"n": "many"}},
    {"c_diff": 0.75},
    {"limit": {"nu_list": [0.025, 0.05]}},
    {"poincare": {"deltas": [1.5]}},
    {"gas": {"gamma": 3.0, "alpha": 1.0}},
    {"perturbation": [{"kind": "box", "amplitude": 1, "width": 1}]},
    {"preset": "nope"},
])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ConfigError):
        load_config(None, bad)


def test_invalid_config_writes_nothing(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["profile", "--config", write(tmp_path, {"lambda": 0.05}), "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["check", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_missing_config_is_io_error(tmp_path):
    assert main(["check", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 4


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["poincare", "--config", write(tmp_path, {"poincare": {"deltas": [0.01], "C1": [1.0],
                 "n_samples": 10, "n_polish": 0}}), "--out", str(blocker / "sub")]) == 4


def test_profile_command(tmp_path):
    out = tmp_path / "prof"
    assert main(["profile", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "ok" and summary["results"]["max_residual"] < 1e-6
    for f in summary["files"]:
        assert (out / f).exists()
    rows = list(csv.DictReader((out / "decay_fit.csv").open()))
    assert [float(r["eps"]) for r in rows] == [0.05, 0.1, 0.2]


def test_profile_residual_failure_exit(tmp_path):
    cfg = write(tmp_path, {"profile": {"residual_tol": 1e-14}})
    assert main(["profile", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_poincare_reproducible(tmp_path):
    doc = {"poincare": {"deltas": [0.01, 0.5], "C1": [1.0, 5.0], "n_samples": 200, "n_polish": 2}}
    cfg = write(tmp_path, doc)
    for k in (1, 2):
        assert main(["poincare", "--config", cfg, "--seed", "3", "--out", str(tmp_path / f"p{k}")]) == 0
    a = (tmp_path / "p1" / "poincare.csv").read_text()
    assert a == (tmp_path / "p2" / "poincare.csv").read_text()
    rows = list(csv.DictReader((tmp_path / "p1" / "poincare.csv").open()))
    assert len(rows) == 4 and all(r["seed"] == "3.0" for r in rows)


def test_poincare_threads_match_serial(tmp_path):
    doc = {"poincare": {"deltas": [0.01, 0.2], "C1": [1.0], "n_samples": 100, "n_polish": 1}}
    cfg = write(tmp_path, doc)
    main(["poincare", "--config", cfg, "--out", str(tmp_path / "s")])
    main(["poincare", "--config", cfg, "--threads", "2", "--out", str(tmp_path / "t")])
    assert (tmp_path / "s" / "poincare.csv").read_text() == (tmp_path / "t" / "poincare.csv").read_text()


def test_check_passes(tmp_path):
    assert main(["check", "--out", str(tmp_path / "c")]) == 0
    verdict = json.loads((tmp_path / "c" / "summary.json").read_text())["results"]
    assert all(v["passed"] for v in verdict.values())


def test_check_detects_flipped_good_term(tmp_path, monkeypatch):
    original = fn.good_terms

    def flipped(*a, **k):
        out = original(*a, **k)
        out["G2_1"] = -out["G2_1"]
        return out

    monkeypatch.setattr(fn, "good_terms", flipped)
    assert main(["check", "--out", str(tmp_path / "c")]) == 3
    verdict = json.loads((tmp_path / "c" / "summary.json").read_text())["results"]
    assert not verdict["budget_identity"]["passed"]


def test_contract_short_run(tmp_path):
    cfg = write(tmp_path, {"T": 0.1, "grid": {"x_min": -250, "x_max": 250, "n": 1000}, "cadence": 2})
    assert main(["contract", "--config", cfg, "--out", str(tmp_path / "c")]) == 0
    s = json.loads((tmp_path / "c" / "summary.json").read_text())["results"]
    assert s["separation_violations"] == 0 and s["min_gap_margin"] >= 0
    with (tmp_path / "c" / "timeseries.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert float(rows[-1]["t"]) == pytest.approx(0.1)
    assert {"X1", "X2", "dX1", "dX2", "branch1", "Jbad", "budget_residual"} <= set(rows[0])


def test_contract_blow_up(tmp_path):
    cfg = write(tmp_path, {"T": 1.0, "dt": 0.2})
    assert main(["contract", "--config", cfg, "--out", str(tmp_path / "c")]) == 3
    assert (tmp_path / "c" / "snapshot_last_good.csv").exists()


def test_simulate_snapshots(tmp_path):
    cfg = write(tmp_path, {"T": 0.05, "grid": {"x_min": -250, "x_max": 250, "n": 1000}, "cadence": 5})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    snaps = sorted((tmp_path / "s").glob("snapshot_*.csv"))
    assert len(snaps) >= 2
    data = np.loadtxt(snaps[-1], delimiter=",", skiprows=1)
    assert data.shape[1] == 4 and np.all(data[:, 1] > 0)
