import csv
import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from spectral_bounds import bounds as B
from spectral_bounds.cli import RunConfig, UsageError, build_config, main, parse_k_range

SQUARE = '{"kind":"box","sides":[1,1]}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_k_range():
    assert parse_k_range("5") == [5]
    assert parse_k_range("1..4") == [1, 2, 3, 4]
    assert parse_k_range("2..10..4") == [2, 6, 10]
    ks = parse_k_range("log:1..1000:7")
    assert ks[0] == 1 and ks[-1] == 1000 and ks == sorted(set(ks))
    for bad in ("0..3", "5..2", "a..b", "1..2..0", "log:0..5:3", ""):
        with pytest.raises(UsageError):
            parse_k_range(bad)


def test_bounds_row_count_and_melas_value(capsys):
    code, out, _ = run(capsys, "bounds", "--domain", SQUARE, "--l", "1", "--k", "1..100",
                       "--which", "li_yau,melas,rigorous")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 300
    assert list(rows[0]) == ["k", "id", "value", "terms", "note"]
    assert {r["id"] for r in rows} == {"li_yau", "melas", "rigorous"}
    melas1 = next(r for r in rows if r["id"] == "melas" and r["k"] == "1")
    assert float(melas1["value"]) == 2 * math.pi + 1 / 16
    # 17 significant digits round-trip exactly
    assert float(melas1["value"]) == B.melas(B.ProblemSpec(2, 1.0, 1 / 6), 1).value
    terms = json.loads(melas1["terms"])
    assert [t["name"] for t in terms] == ["weyl", "inertia"]


def test_bounds_thm3_uses_exact_alpha2(capsys):
    code, out, _ = run(capsys, "bounds", "--domain", SQUARE, "--a", "1", "--k", "3", "--which", "thm3")
    assert code == 0
    value = float(rows_of(out)[0]["value"])
    spec = B.ProblemSpec(2, 1.0, 1 / 6, a=1.0)
    assert value == B.thm3(spec, 3).value
    assert B.ALPHA[2] == Fraction(12095, 12096)


def test_bounds_inapplicable_exits_2(capsys):
    code, _, err = run(capsys, "bounds", "--n", "5", "--volume", "1", "--inertia", "1", "--a", "1",
                       "--which", "thm3")
    assert code == 2 and "n in {2, 3, 4}" in err
    code, _, err = run(capsys, "bounds", "--domain", SQUARE, "--which", "cheng_wei")
    assert code == 2 and "l=2" in err
    code, _, _ = run(capsys, "bounds", "--domain", SQUARE, "--which", "nonsense")
    assert code == 2


def test_bounds_total_and_default_selection(capsys):
    _, mean_out, _ = run(capsys, "bounds", "--domain", SQUARE, "--k", "4", "--which", "li_yau")
    _, sum_out, _ = run(capsys, "bounds", "--domain", SQUARE, "--k", "4", "--which", "li_yau", "--total")
    assert float(rows_of(sum_out)[0]["value"]) == pytest.approx(4 * float(rows_of(mean_out)[0]["value"]))
    _, out, _ = run(capsys, "bounds", "--domain", SQUARE, "--l", "2", "--k", "2")
    ids = {r["id"] for r in rows_of(out)}
    assert {"levine_protter_l2", "ilyin_n2_l2", "cheng_wei", "thm3", "rigorous"} <= ids
    assert ids <= set(B.BOUND_IDS)


def test_bounds_json(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "bounds", "--domain", SQUARE, "--k", "1..2", "--which", "melas",
                       "--format", "json", "--output", str(path))
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert set(doc) == {"config", "rows", "diagnostics"}
    assert doc["config"]["domain"] == {"kind": "box", "sides": [1.0, 1.0]}
    assert len(doc["rows"]) == 2


def test_output_is_deterministic(capsys):
    argv = ["bounds", "--domain", SQUARE, "--l", "2", "--k", "log:1..1000:20", "--seed", "3"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_verify_unit_square_l1(capsys):
    code, out, _ = run(capsys, "verify", "--domain", SQUARE, "--l", "1", "--k", "1..2000",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["diagnostics"]["ok"]
    ids = {r["id"] for r in doc["rows"]}
    assert {"li_yau", "melas", "ilyin_l1", "cheng_qi_wei", "rigorous"} <= ids
    assert "polya" not in ids and "thm1" not in ids


def test_verify_without_oracle_exits_2(capsys):
    assert run(capsys, "verify", "--domain", SQUARE, "--l", "3")[0] == 2
    assert run(capsys, "verify", "--n", "3", "--volume", "1", "--inertia", "1")[0] == 2


def test_verify_clamped_plate_small_grids(capsys):
    code, out, _ = run(capsys, "verify", "--domain", SQUARE, "--a", "0", "--k", "1..10",
                       "--grids", "32,64", "--format", "json")
    doc = json.loads(out)
    assert code == 0, doc["diagnostics"]["violations"]
    assert doc["diagnostics"]["slack"] == 0.01
    assert doc["diagnostics"]["provenance"]["extrapolated"]


def test_verify_failure_exits_1(capsys):
    # a huge slack of the wrong sign turns every bound into a violation
    code, _, err = run(capsys, "verify", "--domain", SQUARE, "--k", "1..3", "--slack", "-10")
    assert code == 1 and "violation" in err


def test_root(capsys):
    code, out, _ = run(capsys, "root", "--n", "4", "--kstar", "1")
    rows = {r["method"]: r for r in rows_of(out)}
    assert code == 0 and set(rows) == {"numeric", "exact4"}  # zeta < 1: no asymptotic row
    assert abs(float(rows["numeric"]["t"])) < 1e-15 and abs(float(rows["exact4"]["t"])) < 1e-15
    _, out, _ = run(capsys, "root", "--n", "3", "--kstar", "1e6", "--format", "json")
    doc = json.loads(out)
    assert abs(doc["diagnostics"]["pairwise_deltas"]["numeric-exact3"]) <= 1e-10
    _, out, _ = run(capsys, "root", "--n", "2", "--kstar", "7")
    assert float(rows_of(out)[0]["t"]) == pytest.approx(1.0, rel=1e-14)
    assert run(capsys, "root", "--n", "3", "--kstar", "0.5")[0] == 2


def test_compare(capsys):
    code, out, err = run(capsys, "compare", "--domain", SQUARE, "--l", "2", "--k", "log:1..1e5:12")
    rows = rows_of(out)
    assert code == 0
    assert {float(r["ratio"]) for r in rows} == {6.0}
    assert "crossover" in err
    _, out, _ = run(capsys, "compare", "--domain", SQUARE, "--l", "1", "--k", "1..5", "--format", "json")
    doc = json.loads(out)
    assert doc["diagnostics"]["ratio"] == 4
    assert doc["diagnostics"]["note"].startswith(("crossover", "none in range"))


def test_config_file_and_precedence(tmp_path, monkeypatch):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps({"domain": SQUARE, "k": "1..3", "seed": 4, "which": "melas"}))
    cfg = build_config(["bounds", "--config", str(cfg_path), "--k", "7"])
    assert isinstance(cfg, RunConfig)
    assert cfg.k == "7" and cfg.seed == 4 and cfg.which == ["melas"]
    monkeypatch.setenv("SPECTRAL_BOUNDS_SEED", "99")
    assert build_config(["bounds", "--domain", SQUARE, "--seed", "1"]).seed == 99
    cfg_path.write_text(json.dumps({"colour": "blue"}))
    with pytest.raises(UsageError):
        build_config(["bounds", "--config", str(cfg_path)])


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "spectral_bounds", "root", "--n", "2", "--kstar", "7"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("method,t,residual")
