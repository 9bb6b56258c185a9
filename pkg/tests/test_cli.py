import json
from pathlib import Path

import pytest

from twistlab.cli import EXIT_BUDGET, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(args + ["-o", str(out)])
    return code, out.read_bytes() if out.exists() else b""


def test_gsd_passes(tmp_path):
    code, raw = run(["gsd", str(CONFIGS / "h_alpha_2x3.toml")], tmp_path)
    assert code == EXIT_OK
    report = json.loads(raw)
    assert report["passed"] and report["results"]["gsd"]["passed"]


def test_expectation_mismatch_exits_one(tmp_path):
    # the 3x3 doubly twisted torus has four ground states, not one
    code, raw = run(["run", str(CONFIGS / "h_alpha_alpha_3x3.toml")], tmp_path)
    assert code == EXIT_CHECK_FAILED
    assert not json.loads(raw)["passed"]


def test_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('[model]\nvariant = "h_gamma"\n[lattice]\nextents = [2, 2]\n')
    assert main(["run", str(bad)]) == EXIT_CONFIG
    assert json.loads(capsys.readouterr().err)["error"] == "config"
    assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_CONFIG


def test_trace_budget(tmp_path, capsys):
    code = main(["run", str(CONFIGS / "h_alpha_2x3.toml"), "--trace-budget", "2", "-o", str(tmp_path / "r.json")])
    assert code == EXIT_BUDGET
    assert json.loads(capsys.readouterr().err)["error"] == "budget"


def test_reports_are_byte_identical(tmp_path):
    cfg = str(CONFIGS / "h_alpha_2x3.toml")
    _, first = run(["run", cfg], tmp_path, "a.json")
    _, second = run(["run", cfg], tmp_path, "b.json")
    assert first == second and first


def test_render(tmp_path, capsys):
    assert main(["render", str(CONFIGS / "h_alpha_excitations.toml"), "--outdir", str(tmp_path)]) == EXIT_OK
    printed = capsys.readouterr().out.split()
    files = sorted(tmp_path.glob("*.svg"))
    assert files and len(files) == len(printed)
    assert all(f.read_text().startswith("<svg") for f in files)


def test_group_show(capsys):
    assert main(["group", "show"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "ab" in out
    assert main(["group", "show", "--factors", "2", "4", "--cocycle", "pairing", "--pairing", "[[0, 2], [0, 0]]"]) == 0


@pytest.mark.parametrize("config", [None, "peps_z22.toml"])
def test_peps_verify(tmp_path, config):
    args = ["peps-verify"] + ([str(CONFIGS / config)] if config else [])
    code, raw = run(args, tmp_path)
    assert code == EXIT_OK and json.loads(raw)["passed"]
