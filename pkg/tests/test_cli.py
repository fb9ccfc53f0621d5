import json
import subprocess
import sys

import pytest

from isingcert.cli import EXIT_BUDGET, EXIT_CONFIG, EXIT_OK, EXIT_PROMISE, main
from isingcert.errors import ConfigError
from isingcert.tasks import validate_config


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_constants_ledger_flag(capsys):
    assert main(["--constants"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "far_threshold_strict" in out
    assert "trotter_kappa" in out
    # every constant appears exactly once
    names = [line.split()[0] for line in out.strip().splitlines()]
    assert len(names) == len(set(names))


def test_missing_config_is_usage_error():
    with pytest.raises(SystemExit):
        main([])


def test_unreadable_config(tmp_path):
    assert main(["--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["--config", str(path)]) == EXIT_CONFIG


def test_schema_validation_errors(tmp_path):
    cases = [
        {"task": "verify-bonami"},                                   # no version
        {"schema_version": 1, "task": "unknown-task"},
        {"schema_version": 1, "task": "verify-bonami", "seed": -1},
        {"schema_version": 1, "task": "verify-bonami", "params": {"bogus": 1}},
        {"schema_version": 1, "task": "verify-bonami", "params": "x"},
    ]
    for i, raw in enumerate(cases):
        path = write_config(tmp_path, raw, f"c{i}.json")
        assert main(["--config", path]) == EXIT_CONFIG
    with pytest.raises(ConfigError):
        validate_config({"schema_version": 2, "task": "verify-bonami"})


def test_budget_overrun_exit_code(tmp_path):
    cfg = {
        "schema_version": 1, "task": "learn-gibbs", "trials": 1,
        "params": {"samples": None, "eta": 0.25},
    }
    path = write_config(tmp_path, cfg)
    assert main(["--config", path, "--out", str(tmp_path / "out")]) == EXIT_BUDGET


def test_strict_profile_flag_refused_at_desk_scale(tmp_path):
    cfg = {"schema_version": 1, "task": "certify-dynamics", "trials": 1,
           "params": {"arm": "close"}}
    path = write_config(tmp_path, cfg)
    assert main(["--config", path, "--out", str(tmp_path / "out"),
                 "--profile", "strict"]) == EXIT_BUDGET


def test_promise_violation_exit_code(tmp_path):
    # far arm needs states at least 2 eps apart; eps = 0.8 breaks that
    cfg = {
        "schema_version": 1, "task": "certify-gibbs", "trials": 1,
        "params": {"arm": "far", "eps": 0.8, "samples": 200},
    }
    path = write_config(tmp_path, cfg)
    assert main(["--config", path, "--out", str(tmp_path / "out")]) == EXIT_PROMISE


def test_successful_run_writes_report_and_tables(tmp_path, capsys):
    cfg = {
        "schema_version": 1, "task": "verify-bonami", "seed": 5, "trials": 10,
        "params": {"n_max": 3},
    }
    path = write_config(tmp_path, cfg)
    out_dir = tmp_path / "out"
    assert main(["--config", path, "--out", str(out_dir)]) == EXIT_OK
    report = json.loads((out_dir / "verify-bonami.json").read_text())
    assert report["violations"] == 0
    assert report["resolved_config"]["seed"] == 5
    assert report["resolved_config"]["trials"] == 10
    assert any(c["name"] == "trotter_kappa" for c in report["constants"])
    csv_text = (out_dir / "verify-bonami_moments.csv").read_text()
    assert csv_text.startswith("trial,n,l,moment,bound,slack")


def test_cli_overrides_apply(tmp_path):
    cfg = {"schema_version": 1, "task": "verify-bonami", "seed": 1, "trials": 50,
           "params": {"n_max": 3}}
    path = write_config(tmp_path, cfg)
    out_dir = tmp_path / "out"
    assert main(["--config", path, "--out", str(out_dir),
                 "--trials", "4", "--seed", "9"]) == EXIT_OK
    report = json.loads((out_dir / "verify-bonami.json").read_text())
    assert report["resolved_config"]["trials"] == 4
    assert report["resolved_config"]["seed"] == 9


def test_env_var_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ISINGCERT_OUT", str(tmp_path / "envout"))
    monkeypatch.chdir(tmp_path)
    cfg = {"schema_version": 1, "task": "verify-bonami", "trials": 3,
           "params": {"n_max": 2}}
    path = write_config(tmp_path, cfg)
    assert main(["--config", path]) == EXIT_OK
    assert (tmp_path / "envout" / "verify-bonami.json").exists()


def test_reports_byte_identical_across_runs(tmp_path):
    cfg = {"schema_version": 1, "task": "certify-dynamics", "seed": 21, "trials": 3,
           "params": {"arm": "close"}}
    path = write_config(tmp_path, cfg)
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    assert main(["--config", path, "--out", str(a_dir)]) == EXIT_OK
    assert main(["--config", path, "--out", str(b_dir)]) == EXIT_OK
    a = (a_dir / "certify-dynamics_close.json").read_bytes()
    b = (b_dir / "certify-dynamics_close.json").read_bytes()
    assert a == b
    a_csv = (a_dir / "certify-dynamics_close_verdicts.csv").read_bytes()
    b_csv = (b_dir / "certify-dynamics_close_verdicts.csv").read_bytes()
    assert a_csv == b_csv


def test_parallel_records_match_serial(tmp_path):
    base = {"schema_version": 1, "task": "verify-bounds", "seed": 3, "trials": 6,
            "params": {"footnote_pairs": 4}}
    p_serial = write_config(tmp_path, {**base, "parallelism": 1}, "s.json")
    p_par = write_config(tmp_path, {**base, "parallelism": 2}, "p.json")
    assert main(["--config", p_serial, "--out", str(tmp_path / "s")]) == EXIT_OK
    assert main(["--config", p_par, "--out", str(tmp_path / "p")]) == EXIT_OK
    a = json.loads((tmp_path / "s" / "verify-bounds.json").read_text())
    b = json.loads((tmp_path / "p" / "verify-bounds.json").read_text())
    assert a["trials"] == b["trials"]
    assert a["footnote_trials"] == b["footnote_trials"]


def test_module_entry_point(tmp_path):
    cfg = {"schema_version": 1, "task": "verify-bonami", "trials": 2,
           "params": {"n_max": 2}}
    path = write_config(tmp_path, cfg)
    proc = subprocess.run(
        [sys.executable, "-m", "isingcert.cli", "--config", path,
         "--out", str(tmp_path / "out")],
        capture_output=True, text=True,
    )
    assert proc.returncode == EXIT_OK, proc.stderr
    assert (tmp_path / "out" / "verify-bonami.json").exists()
