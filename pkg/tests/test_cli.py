"""CLI behavior and exit codes: 0 success, 1 validation error, 2 runtime failure."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from blast.jobs.cli import main
from blast.structures import dimer, make_lattice
from blast.trainset import save_structures

from test_jobs import dimer_targets, quick_config


@pytest.fixture
def runner():
    return CliRunner()


def test_model_list(runner):
    res = runner.invoke(main, ["model", "list"])
    assert res.exit_code == 0
    for model_id in ("lennard_jones", "morse", "stillinger_weber"):
        assert model_id in res.output


def test_model_show(runner):
    res = runner.invoke(main, ["model", "show", "morse"])
    assert res.exit_code == 0
    assert "r0" in res.output and "cutoff" in res.output

    res = runner.invoke(main, ["model", "show", "lennard_jones", "--species", "A,B"])
    assert res.exit_code == 0
    assert "epsilon_A_B" in res.output

    res = runner.invoke(main, ["model", "show", "eam"])
    assert res.exit_code == 1
    assert "error:" in res.output


def test_data_validate(runner, tmp_path):
    path = tmp_path / "set.xyz"
    save_structures(path, [dimer("X", "X", 1.5).with_label("pair"),
                           make_lattice("fcc", 4.0, "X").with_label("bulk")])
    res = runner.invoke(main, ["data", "validate", str(path)])
    assert res.exit_code == 0
    assert "pair: 2 atoms, cluster" in res.output
    assert "bulk: 4 atoms, periodic" in res.output
    assert "ok: 2 structure(s)" in res.output


def test_data_validate_bad_file(runner, tmp_path):
    bad = tmp_path / "bad.xyz"
    bad.write_text("2\nlabel=broken\nX 0 0 0\n")  # truncated atom block
    res = runner.invoke(main, ["data", "validate", str(bad)])
    assert res.exit_code == 1
    res = runner.invoke(main, ["data", "validate", str(tmp_path / "missing.xyz")])
    assert res.exit_code == 2


def test_run_command(runner, tmp_path):
    cfg = tmp_path / "fit.json"
    cfg.write_text(json.dumps(quick_config()))
    res = runner.invoke(main, ["run", str(cfg), "--home", str(tmp_path / "home")])
    assert res.exit_code == 0, res.output
    assert "iter     5" in res.output
    assert '"learn_result"' in res.output


def test_run_invalid_config(runner, tmp_path):
    doc = quick_config()
    doc["learner"]["strategy"] = "warp"
    cfg = tmp_path / "fit.json"
    cfg.write_text(json.dumps(doc))
    res = runner.invoke(main, ["run", str(cfg), "--home", str(tmp_path / "home")])
    assert res.exit_code == 1
    assert "config error: learner.strategy" in res.output


def test_run_unreadable_config(runner, tmp_path):
    res = runner.invoke(main, ["run", str(tmp_path / "none.json")])
    assert res.exit_code == 2
    cfg = tmp_path / "garbage.json"
    cfg.write_text("{nope")
    res = runner.invoke(main, ["run", str(cfg)])
    assert res.exit_code == 1


def test_validate_command_pass_and_fail(runner, tmp_path):
    cfg = tmp_path / "fit.json"
    cfg.write_text(json.dumps(quick_config()))
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"epsilon": 0.8, "sigma": 1.1, "cutoff": 6.6}))
    res = runner.invoke(main, ["validate", str(cfg), str(good),
                               "--home", str(tmp_path)])
    assert res.exit_code == 0, res.output
    assert res.output.count("pass") >= 3
    assert "rms normalized residual" in res.output

    off = tmp_path / "off.json"
    off.write_text(json.dumps([0.5, 1.3, 6.6]))  # list form also accepted
    res = runner.invoke(main, ["validate", str(cfg), str(off),
                               "--home", str(tmp_path)])
    assert res.exit_code == 1
    assert "FAIL" in res.output


def test_validate_command_bounds(runner, tmp_path):
    cfg = tmp_path / "fit.json"
    cfg.write_text(json.dumps(quick_config()))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"epsilon": -2.0, "sigma": 1.1, "cutoff": 6.6}))
    res = runner.invoke(main, ["validate", str(cfg), str(bad),
                               "--home", str(tmp_path)])
    assert res.exit_code == 1
    assert "out of bounds: epsilon" in res.output

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"epsilon": 0.8}))
    res = runner.invoke(main, ["validate", str(cfg), str(missing),
                               "--home", str(tmp_path)])
    assert res.exit_code == 1
    assert "missing parameter" in res.output
