import csv
import io
import json
from fractions import Fraction

import pytest

from bqke.cli import REPORT_FIELDS, dumps_json, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_p48_json(capsys):
    code, out, _ = run(capsys, "compute", "--family", "P48", "--p", "5", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert tuple(rec) == REPORT_FIELDS
    assert float(rec["c_float_re"]) == pytest.approx(-17682.290187324, rel=1e-12)
    assert rec["c_float_im"] == "0"


def test_compute_trivial(capsys):
    code, out, _ = run(capsys, "compute", "--family", "trivial")
    rec = json.loads(out)
    assert code == 0
    assert rec["c_exact"] == "0" and rec["verdict"] == "KE_possible"


def test_compute_q1_p3(capsys):
    code, out, _ = run(capsys, "compute", "--family", "Q", "--n", "1", "--p", "3")
    rec = json.loads(out)
    assert Fraction(rec["c_exact"]) == Fraction(124555, 720)
    assert rec["parity_720c"] == "124555" and rec["parity_odd"] is True


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "compute", "--family", "Pprime", "--m", "2", "--p", "5")
    assert dumps_json(json.loads(out)) == out


def test_float_mode_and_digits_env(capsys, monkeypatch):
    monkeypatch.setenv("BQKE_DIGITS", "20")
    _, out, _ = run(capsys, "compute", "--family", "P48", "--mode", "float")
    rec = json.loads(out)
    _, exact_out, _ = run(capsys, "compute", "--family", "P48")
    assert rec["c_float_re"] == json.loads(exact_out)["c_float_re"] == "-5968.348737366255144"
    assert rec["c_exact"] is None


def test_exit_codes(capsys):
    assert run(capsys, "compute", "--family", "Q", "--p", "2")[0] == 2
    assert run(capsys, "compute", "--bogus")[0] == 2
    assert run(capsys, "compute")[0] == 2
    assert run(capsys, "compute", "--family", "E8")[0] == 2
    assert run(capsys, "compute", "--family", "P48", "--digits", "5")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


@pytest.mark.parametrize("selector, rows, probe", [
    ("p48", 9, ("", "1", -5968.348737366)),
    ("pprime", 12, ("3", "1", 16148.9146758443)),
    ("p120", 12, ("", "11", -792274.9699035)),
])
def test_table(capsys, selector, rows, probe):
    code, out, _ = run(capsys, "table", selector)
    assert code == 0
    table = list(csv.DictReader(io.StringIO(out)))
    assert len(table) == rows
    assert list(table[0])[:3] == ["m", "p", "C(Gamma)"]
    row = next(r for r in table if (r["m"], r["p"]) == probe[:2])
    assert float(row["C(Gamma)"]) == pytest.approx(probe[2], rel=1e-12)
    assert all(r["match"] == "yes" for r in table)


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "laurent", "--family", "Q", "--n", "1")
    assert code == 0 and "-425/16" in out
    code, out, _ = run(capsys, "verify", "parity", "--family", "Q", "--nmax", "5", "--pset", "3,5,7,11")
    assert code == 0 and "FAIL" not in out
    code, _, _ = run(capsys, "verify", "f-identity", "--nmax", "12")
    assert code == 0


def test_verify_reports_mismatch(capsys):
    code, out, _ = run(capsys, "verify", "groups", "--family", "Pprime", "--m", "1")
    assert code == 1 and "FAIL" in out


def test_scan_examples(capsys):
    code, out, _ = run(capsys, "scan", "--family", "Q", "--nmax", "4", "--pset", "1,3,5,7")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 15  # Q(3) x Z/3 is not a coprime product
    assert all(r["verdict"].startswith("Obstructed") for r in rows)
    code, out, _ = run(capsys, "scan", "--family", "trivial")
    assert code == 0 and "KE_possible" in out
    code, out, _ = run(capsys, "scan", "--family", "D", "--m", "2", "--n", "1", "--pset", "1,5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and all(r["verdict"].startswith("Obstructed") for r in rows)


def test_scan_is_deterministic_across_workers(capsys, tmp_path):
    outs = []
    for workers in ("1", "3"):
        path = tmp_path / f"scan{workers}.csv"
        code, _, _ = run(capsys, "scan", "--family", "Q", "--nmax", "3", "--pset", "1,3,5",
                         "--workers", workers, "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
