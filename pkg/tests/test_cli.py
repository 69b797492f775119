"""Configuration validation, CLI verbs, artifacts, and determinism."""

import json
import os

import pytest

from multibump.cli import main
from multibump.config import (ExperimentConfig, load_config, validate_config)


def test_default_config_round_trip():
    cfg = ExperimentConfig()
    parsed, errors = validate_config(cfg.to_json())
    assert not errors
    assert parsed.to_json() == cfg.to_json()
    assert parsed.digest() == cfg.digest()


def test_validate_collects_all_errors():
    text = json.dumps({
        "problem": {"m": 3.2, "c0": -1.0},
        "suite": "nope",
        "sweeps": {"k": []},
        "threads": 0,
    })
    cfg, errors = validate_config(text)
    assert cfg is None
    fields = {e["field"] for e in errors}
    assert {"problem.m", "problem.c0", "suite", "sweeps.k",
            "threads"} <= fields
    m_err = next(e for e in errors if e["field"] == "problem.m")
    assert "upper bound" in m_err["message"]


def test_validate_rejects_s_out_of_range():
    cfg, errors = validate_config(json.dumps({"problem": {"s": 1.0}}))
    assert cfg is None
    assert any(e["field"] == "problem.s" for e in errors)


def test_validate_bad_json_has_location():
    cfg, errors = validate_config("{not json")
    assert cfg is None
    assert "line" in errors[0]["message"]


def test_cli_list_suites(capsys):
    assert main(["list-suites"]) == 0
    out = capsys.readouterr().out.split()
    assert out == ["bubble", "interactions", "expansion", "landscape",
                   "correction", "all"]


def test_cli_validate(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(ExperimentConfig().to_json())
    assert main(["validate", "--config", str(good)]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problem": {"m": 3.2}}))
    assert main(["validate", "--config", str(bad)]) == 1
    assert "upper bound" in capsys.readouterr().out
    assert main(["validate", "--config", str(tmp_path / "missing.json")]) == 2
    assert load_config(str(good)).suite == "all"
    with pytest.raises(ValueError):
        load_config(str(bad))


def test_cli_run_bubble_artifacts(tmp_path):
    out = tmp_path / "artifacts"
    assert main(["run", "--suite", "bubble", "--out", str(out),
                 "--seed", "3"]) == 0
    summary = (out / "summary.csv").read_text()
    assert summary.splitlines()[0] == ("name,measured,expected,tolerance,"
                                       "status,provenance,anchor,detail")
    assert "passed" in summary and "failed" not in summary
    manifest = (out / "manifest.txt").read_text()
    assert "config_sha256:" in manifest and "seed: 3" in manifest
    assert "version_numpy:" in manifest
    assert json.loads((out / "config.json").read_text())["seed"] == 3


def test_cli_run_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["run", "--suite", "interactions", "--out", str(out),
                     "--seed", "7"]) == 0
        outs.append(out)
    for fname in ("summary.csv", "pair_interactions.csv", "manifest.txt"):
        assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()


def test_cli_run_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problem": {"s": 2.0}}))
    assert main(["run", "--config", str(bad)]) == 2


def test_cli_unknown_suite_rejected():
    with pytest.raises(SystemExit):
        main(["run", "--suite", "everything"])
