"""Command-line dispatch, exit codes and run artifacts."""
import json
import os
from pathlib import Path

import pytest

from hampert.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_NUMERIC, EXIT_OK, content_hash, dispatch


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _manifest(out):
    man = json.loads((out / "manifest.json").read_text())
    for entry in man["outputs"]:
        assert (out / entry["file"]).is_file()
    return man


def test_verify_commuting_first(in_tmp, capsys):
    out = in_tmp / "v"
    assert dispatch(["verify", "commuting-first", "--out", str(out)]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "pass"
    assert {o["status"] for o in rep["orders"]} == {"exact-zero"}
    assert _manifest(out)["passed"] is True


def test_verify_mutation_fails_with_witness(in_tmp, capsys):
    out = in_tmp / "m"
    code = dispatch(["verify", "commuting-first", "--mutate", "h_f:1/480:+1e-6", "--out", str(out)])
    assert code == EXIT_FAIL
    err = capsys.readouterr().err
    assert "witness" in err
    rep = json.loads((out / "report.json").read_text())
    assert any(o["witness"] for o in rep["orders"] if o["status"] != "exact-zero")


def test_catastrophe_json(in_tmp, capsys):
    out = in_tmp / "c"
    assert dispatch(["catastrophe", "--a", "u", "--b", "-u-u^3", "--out", str(out)]) == EXIT_OK
    d = json.loads(capsys.readouterr().out)
    assert (d["x0"], d["t0"], d["v0"], d["kappa"]) == pytest.approx((0, 1, 0, 6), abs=1e-10)
    assert json.loads((out / "catastrophe.json").read_text()) == d


def test_config_errors(in_tmp):
    assert dispatch(["catastrophe", "--b", "-u-", "--out", "x"]) == EXIT_CONFIG
    assert dispatch(["verify", "nonsense"]) == EXIT_CONFIG
    assert dispatch(["simulate", "--config", "missing.ini", "--out", "x"]) == EXIT_CONFIG
    bad = in_tmp / "bad.ini"
    bad.write_text("[simulate]\nnot_a_key = 3\n")
    assert dispatch(["simulate", "--config", str(bad), "--out", "x"]) == EXIT_CONFIG
    bad.write_text("[simulate]\nN = 300\n")
    assert dispatch(["simulate", "--config", str(bad), "--out", "x"]) == EXIT_CONFIG


def test_numerical_failure(in_tmp):
    assert dispatch(["catastrophe", "--a", "u", "--b", "-u", "--out", "x"]) == EXIT_NUMERIC


def test_simulate_is_reproducible_and_contained(in_tmp):
    cfg = in_tmp / "sim.ini"
    cfg.write_text("[simulate]\neps = 0.1\nN = 256\ndt = 1e-3\nt_end = 0.05\nsnapshots = 0.025\n")
    before = set(os.listdir(in_tmp))
    for name in ("r1", "r2"):
        assert dispatch(["simulate", "--config", str(cfg), "--out", str(in_tmp / name)]) == EXIT_OK
    assert set(os.listdir(in_tmp)) - before == {"r1", "r2"}
    files = sorted(p.name for p in (in_tmp / "r1").glob("snapshot_*.csv"))
    assert files == ["snapshot_000.csv", "snapshot_001.csv", "snapshot_002.csv"]
    for f in files:
        assert (in_tmp / "r1" / f).read_bytes() == (in_tmp / "r2" / f).read_bytes()
    m1, m2 = _manifest(in_tmp / "r1"), _manifest(in_tmp / "r2")
    assert m1["input_hash"] == m2["input_hash"]
    line = (in_tmp / "r1" / files[0]).read_bytes().split(b"\r\n")[1]
    assert len(line.split(b",")[1].replace(b"-", b"").replace(b".", b"").split(b"e")[0]) <= 17


def test_p2_solve(in_tmp, capsys):
    out = in_tmp / "p"
    assert dispatch(["p2", "solve", "--T", "-10", "--N", "801", "--out", str(out)]) == EXIT_OK
    raw = (out / "p2_solution.csv").read_bytes()
    assert raw.startswith(b"X,U\r\n") and raw.count(b"\r\n") == 802


def test_specializations(in_tmp, capsys):
    assert dispatch(["specializations", "--out", str(in_tmp / "s")]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert all(r["match"] for r in rows)


def test_default_run_directory(in_tmp):
    assert dispatch(["catastrophe"]) == EXIT_OK
    (d,) = Path("hampert-runs").iterdir()
    assert d.name.startswith("catastrophe-") and (d / "manifest.json").is_file()


def test_hash_stable_under_reserialization():
    cfg = {"b": "-u-u^3", "v_bracket": [-10.0, 10.0], "a": "u"}
    assert content_hash(cfg) == content_hash(json.loads(json.dumps(cfg, indent=4)))


def test_inline_comments_in_config(in_tmp, capsys):
    cfg = in_tmp / "c.ini"
    cfg.write_text("[catastrophe]\nb = -2*u-u^3   ; a steeper profile\n")
    assert dispatch(["catastrophe", "--config", str(cfg), "--out", "c"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["t0"] == pytest.approx(2.0)
