import csv
import json
import math

import pytest

from g2coflow.cli import main
from g2coflow.config import ConfigError, load_config


def run(args):
    return main(args)


def test_flow_closed_form_csv(tmp_path):
    out = tmp_path / "a0"
    assert run(["flow", "--epsilon", "1", "--A", "0", "--t-end", "0.19",
                "-o", str(out)]) == 0
    rows = list(csv.DictReader(open(f"{out}.csv")))
    assert list(rows[0].keys()) == ["t", "a", "b", "lambda", "T_minus_t_times_lambda"]
    t = float(rows[-1]["t"])
    b = float(rows[-1]["b"])
    assert abs(b - (1 - 5 * t) ** 0.1) < 1e-8
    # full round-trip precision
    assert float(rows[-1]["b"]) == b
    summary = json.loads(open(f"{out}.json").read())
    assert summary["condition"] == "A=0"
    assert summary["singularity_type"] == "TypeI"
    assert summary["T_max"] == pytest.approx(0.2, rel=1e-6)


def test_flow_constant_regime(tmp_path):
    out = tmp_path / "aeq"
    assert run(["flow", "--epsilon", "1", "--A", "1", "-o", str(out)]) == 0
    summary = json.loads(open(f"{out}.json").read())
    assert summary["condition"] == "A=eps"
    assert summary["outcome"] == "constant"
    assert summary["T_max"] == math.inf or summary["T_max"] is None or summary["T_max"] > 1e100


def test_flow_growth_regime(tmp_path):
    out = tmp_path / "a2"
    assert run(["flow", "--epsilon", "1", "--A", "2", "--t-end", "3", "-o", str(out)]) == 0
    summary = json.loads(open(f"{out}.json").read())
    assert summary["regime"]["monotonicity"] == "increasing"
    assert summary["singularity_type"] == "none"


def test_flow_plot(tmp_path):
    out = tmp_path / "fig"
    assert run(["flow", "--epsilon", "1", "--A", "0", "--t-end", "0.15",
                "-o", str(out), "--plot"]) == 0
    assert (tmp_path / "fig.png").exists()


def test_classify_json():
    assert run(["classify", "--epsilon", "1", "--A", "0"]) == 0
    assert run(["classify", "--epsilon", "1", "--A", "-1"]) == 0
    assert run(["classify", "--epsilon", "-1", "--A", "0"]) == 2


def test_classify_roundtrip_from_csv(tmp_path, capsys):
    out = tmp_path / "rt"
    run(["flow", "--epsilon", "1", "--A", "0.5", "--t-end", "0.2", "-o", str(out)])
    capsys.readouterr()
    code = run(["classify", "--from-csv", f"{out}.csv"])
    captured = capsys.readouterr().out
    assert code == 0
    data = json.loads(captured)
    assert data["verdicts_agree"] is True
    assert data["csv_monotonicity"] == "decreasing"


def test_sweep(tmp_path, monkeypatch):
    monkeypatch.setenv("G2COFLOW_WORKERS", "2")
    out = tmp_path / "sw"
    # note --A=-1,... : a leading dash needs the equals form under argparse
    assert run(["sweep", "--epsilon", "0.5,1", "--A=-1,0,1", "-o", str(out),
                "--plot"]) == 0
    rows = json.loads(open(f"{out}.json").read())
    assert len(rows) == 6
    assert {r["regime"]["condition"] for r in rows} >= {"A<0", "A=0"}
    assert (tmp_path / "sw.png").exists()


def test_verify_algebra_exit_code(tmp_path, capsys):
    out = tmp_path / "rep"
    assert run(["verify", "algebra", "-o", str(out)]) == 0
    report = json.loads(open(f"{out}.report.json").read())
    assert report["n_failed"] == 0
    assert all(c["status"] == "pass" for c in report["checks"])
    # every check carries its identity statement
    assert all(c["statement"] for c in report["checks"])
    capsys.readouterr()


def test_verify_ode_with_plot(tmp_path, capsys):
    out = tmp_path / "rep"
    assert run(["verify", "ode", "-o", str(out), "--plot"]) == 0
    assert (tmp_path / "rep.report.png").exists()
    capsys.readouterr()


def test_config_file_and_schema(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"epsilon": 2.0, "A": 0.0, "t_end": 0.04}))
    out = tmp_path / "cfgrun"
    assert run(["flow", "--config", str(cfg), "-o", str(out)]) == 0
    summary = json.loads(open(f"{out}.json").read())
    assert summary["params"]["epsilon"] == 2.0
    assert summary["T_max"] == pytest.approx(1.0 / 20.0, rel=1e-6)


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"epsilon": 1.0, "bogus": 3}))
    assert run(["flow", "--config", str(cfg)]) == 2
    with pytest.raises(ConfigError):
        load_config(str(cfg))


def test_config_rejects_bad_values(tmp_path):
    cfg = tmp_path / "bad2.json"
    cfg.write_text(json.dumps({"epsilon": -1.0}))
    assert run(["flow", "--config", str(cfg)]) == 2
    cfg.write_text(json.dumps({"model": "nonsense"}))
    assert run(["flow", "--config", str(cfg)]) == 2


def test_flag_overrides_config(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"epsilon": 2.0}))
    merged = load_config(str(cfg), {"epsilon": 0.5, "A": None})
    assert merged["epsilon"] == 0.5
    assert merged["A"] == 0.0  # None overrides ignored


def test_usage_error_exit_code():
    assert run(["bogus-command"]) == 2
