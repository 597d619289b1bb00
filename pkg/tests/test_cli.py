import csv
import json
import os
import subprocess
import sys

import pytest

from hyperlim import cli
from hyperlim.cli import CONVERGENCE, REGISTRY, main


@pytest.fixture(autouse=True)
def pinned_time(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    monkeypatch.delenv("HYPERLIM_PRECISION_BITS", raising=False)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_list_covers_registry(capsys):
    code, out, _ = run(["--list"], capsys)
    assert code == 0
    for key in REGISTRY:
        assert key in out
    assert "convergence ids" in out


def test_usage_errors_exit_2(capsys):
    assert run([], capsys)[0] == 2
    assert run(["verify-theorem", "--digits", "31"], capsys)[0] == 2
    assert run(["verify-theorem", "--digits", "5"], capsys)[0] == 2
    assert run(["lemma", "no_such_lemma"], capsys)[0] == 2
    assert run(["check-identity", "no_such_identity"], capsys)[0] == 2
    assert run(["e-limit", "4", "2"], capsys)[0] == 2
    assert run(["e-limit", "1", "3"], capsys)[0] == 2
    assert run(["check-recursion", "--alpha", "-1"], capsys)[0] == 2
    assert run(["--precision-bits", "16", "lemma", "lemma3"], capsys)[0] == 2
    assert run(["convergence", "nope", "--out", os.devnull], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


def test_check_identity_prop33_hyper_40_rows(tmp_path, capsys):
    out_path = tmp_path / "id.json"
    code, out, _ = run(["check-identity", "prop33_hyper", "--max-n", "40", "--out", str(out_path)], capsys)
    assert code == 0
    data = json.loads(out_path.read_text())
    assert len(data["checks"]) == 40
    assert all(c["passed"] for c in data["checks"])
    assert "40/40 checks passed" in out


def test_resource_limit_exit_3_with_partial_report(capsys):
    code, out, err = run(["check-identity", "prop34_first", "--max-n", "61"], capsys)
    assert code == 3
    assert "resource limit" in err
    assert "60/60 checks passed" in out
    code, _, _ = run(["check-recursion", "--n-max", str(10**5 + 1)], capsys)
    assert code == 3


def test_e_limit_wallis(capsys):
    code, out, _ = run(["e-limit", "1", "2", "--json"], capsys)
    assert code == 0
    check = json.loads(out)["checks"][0]
    assert check["passed"] and check["tolerance"] == "1.0e-8"
    assert check["target"].startswith("0.45158270528945486")


def test_verify_theorem_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["verify-theorem", "--digits", "12", "--out", str(a)], capsys)[0] == 0
    assert run(["verify-theorem", "--digits", "12", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["timestamp"] == "2023-11-14T22:13:20Z"
    assert data["precision_bits"] == 256
    assert len(data["checks"]) == 3
    assert data["checks"][0]["matched_digits"] >= 12


def test_failing_check_exits_1(tmp_path, capsys):
    # a one-level schedule cannot reach 15 digits of A
    cfg = tmp_path / "shallow.conf"
    cfg.write_text("constant_depth = 1\nn0 = 4\n")
    code, out, _ = run(["--config", str(cfg), "constant", "A", "--digits", "15"], capsys)
    assert code == 1
    assert "FAIL" in out


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# comment\nprecision_bits = 320\n")
    code, out, _ = run(["--config", str(cfg), "lemma", "lemma3", "--json"], capsys)
    assert code == 0 and json.loads(out)["precision_bits"] == 320
    code, out, _ = run(["--config", str(cfg), "--precision-bits", "192", "lemma", "lemma3", "--json"], capsys)
    assert code == 0 and json.loads(out)["precision_bits"] == 192
    bad = tmp_path / "bad.conf"
    bad.write_text("colour = blue\n")
    assert run(["--config", str(bad), "lemma", "lemma3"], capsys)[0] == 2
    assert run(["--config", str(tmp_path / "missing.conf"), "lemma", "lemma3"], capsys)[0] == 2


def test_env_precision_default(monkeypatch, capsys):
    monkeypatch.setenv("HYPERLIM_PRECISION_BITS", "384")
    code, out, _ = run(["lemma", "lemma4", "--json"], capsys)
    assert code == 0 and json.loads(out)["precision_bits"] == 384


@pytest.mark.parametrize("target_id", sorted(CONVERGENCE))
def test_convergence_csv(target_id, tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, _, _ = run(["convergence", target_id, "--out", str(path)], capsys)
    assert code == 0
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["parameter", "value", "error_estimate"]
    errs = [float(r[2]) for r in rows[1:]]
    assert len(errs) >= 8
    assert all(x > y for x, y in zip(errs, errs[1:]))


def test_console_script_entry_point(tmp_path):
    env = dict(os.environ, SOURCE_DATE_EPOCH="0")
    proc = subprocess.run(
        [sys.executable, "-m", "hyperlim.cli", "lemma", "lemma3"],
        capture_output=True, text=True, env=env, cwd=tmp_path,
    )
    assert proc.returncode == 0, proc.stderr
    assert "1/1 checks passed" in proc.stdout


def test_verify_all_sections_in_dependency_order():
    names = [name for name, _ in cli.verify_all_sections()]
    assert names[0] == "constant" and names[-1] == "theorem"
    assert names.index("closed_form_recursion") < names.index("theorem")


@pytest.mark.slow
def test_verify_all_sequential_and_parallel_agree(tmp_path, capsys):
    a, b = tmp_path / "seq.json", tmp_path / "par.json"
    assert run(["verify-all", "--out", str(a)], capsys)[0] == 0
    assert run(["--jobs", "2", "verify-all", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
