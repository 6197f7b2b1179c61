from __future__ import annotations

import json
import subprocess
import sys

import pytest

from grnormal.cli import run_command
from grnormal.harness import (
    CONFIRMED,
    INCONCLUSIVE,
    MISMATCH,
    PROVEN_EXCEPTION_CONFIRMED,
    emit_records,
    resolve_seed,
    run_header,
    verify_box,
    verify_cell,
)


def run_json(capsys, argv):
    code = run_command(argv)
    return code, json.loads(capsys.readouterr().out)


def test_predict_command(capsys):
    code, out = run_json(capsys, ["predict", "--a", "3", "--b", "3", "--d", "4"])
    assert code == 0
    assert out["classification"] == ["TangentException"]
    assert out["forced_summands"] == [{"relation": "eq", "degree": 2}, {"relation": "ge", "degree": 4}]


def test_certify_command(capsys):
    code, out = run_json(capsys, ["certify", "--a", "2", "--b", "2", "--d", "3", "--n", "0"])
    assert code == 0
    assert out["conclusion"]["kind"] == "TwoBalanced" and out["conclusion"]["interval"] == [2, 4]
    assert out["revalidated"]
    code, out = run_json(capsys, ["certify", "--a", "3", "--b", "2", "--d", "7", "--tree"])
    assert code == 0 and out["children"]


def test_compute_command_char2(capsys):
    code, out = run_json(capsys, ["compute", "--a", "1", "--b", "3", "--d", "4", "--p", "2", "--samples", "50"])
    assert code == 0
    assert out["type"] == [8, 6] and out["verdict"] == CONFIRMED
    assert out["field"] == "characteristic 2"


def test_compute_with_modifications(capsys):
    code, out = run_json(capsys, ["compute", "--a", "2", "--b", "3", "--d", "3", "--samples", "2",
                                  "--mod", "lower", "--mod", "lower"])
    assert code == 0
    assert out["params"]["n"] == 2 and out["certificate"]["instance"] == [2, 3, 3, 2]
    assert sum(out["type"]) == 5 * 3 - 2 + 2 * 2


def test_sweep_command(capsys):
    code, out = run_json(capsys, ["sweep-lemmas", "--a-max", "5", "--b-max", "5", "--d-max", "10", "--n-max", "3"])
    assert code == 0 and all(r["pass"] for r in out["lemmas"])


@pytest.mark.parametrize("argv", [
    [],
    ["predict", "--a", "2"],
    ["frobnicate"],
    ["certify", "--a", "2", "--b", "1", "--d", "3"],
    ["compute", "--a", "2", "--b", "2", "--d", "2", "--p", "10"],
    ["verify", "--a-max", "2", "--b-max", "2", "--d-max", "2", "--jobs", "0"],
    ["predict", "--a", "1", "--b", "1", "--d", "2"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run_command(argv) == 2


def test_seed_resolution(monkeypatch):
    monkeypatch.delenv("GB_SEED", raising=False)
    assert resolve_seed(None) == 0
    monkeypatch.setenv("GB_SEED", "41")
    assert resolve_seed(None) == 41 and resolve_seed(3) == 3
    monkeypatch.setenv("GB_SEED", "x")
    with pytest.raises(ValueError):
        resolve_seed(None)


def test_verdicts():
    assert verify_cell(2, 2, 3, 1009, 3, 0).verdict == CONFIRMED
    rec = verify_cell(3, 3, 4, 1009, 3, 0)
    assert rec.verdict == PROVEN_EXCEPTION_CONFIRMED and rec.checks["forced_summands_present"]
    rec = verify_cell(2, 5, 3, 1009, 3, 0)
    assert rec.verdict == PROVEN_EXCEPTION_CONFIRMED and rec.checks["matches_degeneracy_decomposition"]
    assert rec.field == "F_1009 as a proxy for characteristic 0"


def test_outside_conditional_interval_is_not_a_mismatch():
    rec = verify_cell(2, 5, 4, 1009, 5, 0)
    assert rec.checks["within_certificate_interval"] is False
    assert rec.verdict == PROVEN_EXCEPTION_CONFIRMED and rec.reasons


def test_zero_budget_is_inconclusive():
    rec = verify_cell(2, 2, 3, 1009, 0, 0)
    assert rec.verdict == INCONCLUSIVE and rec.verdict != MISMATCH


def test_jsonl_output_and_determinism(tmp_path):
    path = tmp_path / "run.jsonl"
    box = {"a_max": 2, "b_max": 3, "d_max": 2}
    recs = verify_box(2, 3, 2, 1009, 2, 5)
    emit_records(recs, path, run_header(box, 5, 1009, 2))
    emit_records(verify_box(2, 3, 2, 1009, 2, 5, jobs=2), path, run_header(box, 5, 1009, 2))
    lines = path.read_text().splitlines()
    n = len(recs)
    assert len(lines) == 2 * (n + 1)
    assert json.loads(lines[0])["record"] == "header"
    assert lines[1:n + 1] == lines[n + 2:]
    keys = [(r["params"]["a"], r["params"]["b"], r["params"]["d"]) for r in map(json.loads, lines[1:n + 1])]
    assert keys == sorted(keys)


def test_empty_sweep_writes_header_only(tmp_path):
    path = tmp_path / "empty.jsonl"
    emit_records([], path, run_header({}, 0, 1009, 5))
    assert len(path.read_text().splitlines()) == 1


def test_verify_command_writes_file(tmp_path, capsys):
    path = tmp_path / "v.jsonl"
    code, out = run_json(capsys, ["verify", "--a-max", "1", "--b-max", "3", "--d-max", "2", "--samples", "2",
                                  "--out", str(path)])
    assert code == 0 and out["cells"] == 4
    assert len(path.read_text().splitlines()) == 5


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "grnormal", "predict", "--a", "2", "--b", "2", "--d", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["predicted_type"] == [4, 3, 3]
