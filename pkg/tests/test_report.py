import json
from fractions import Fraction

import mpmath
from mpmath import mpf

from hyperlim.report import VerificationReport, make_check, report_timestamp


def test_make_check_pass_iff_gap_within_tolerance():
    assert make_check("x", Fraction(1, 3), Fraction(1, 3), 0).passed
    # dyadic values, so the boundary case is represented exactly
    tol = Fraction(1, 2**30)
    assert make_check("x", mpf("0.5"), Fraction(1, 2) + tol, tol).passed
    assert not make_check("x", mpf("0.5"), Fraction(1, 2) + 2 * tol, tol).passed


def test_gap_is_exact_for_tiny_differences():
    # a 2^-200 gap must not vanish when the operands are near 1
    with mpmath.workprec(256):
        a = mpf(1) + mpf(2) ** -200
    assert not make_check("x", a, 1, 0).passed
    assert make_check("x", a, 1, mpf(2) ** -199).passed


def test_decimal_text_carries_enough_digits():
    with mpmath.workprec(256):
        pi = +mpmath.pi
        near = pi + mpf(10) ** -30
    chk = make_check("pi", near, pi, mpf(10) ** -20)
    assert chk.matched_digits in (29, 30, 31)
    frac = chk.computed.split(".")[1]
    assert len(frac) >= chk.matched_digits + 2
    assert chk.computed != chk.target


def test_matched_digits_clamped_to_precision():
    chk = make_check("z", 0, 0, 0, prec=256)
    assert chk.matched_digits == 77
    assert chk.tolerance == "0"


def test_timestamp_respects_source_date_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "86400")
    assert report_timestamp() == "1970-01-02T00:00:00Z"
    monkeypatch.delenv("SOURCE_DATE_EPOCH")
    assert report_timestamp().endswith("Z")


def test_report_json_roundtrip(tmp_path):
    rep = VerificationReport(tool_version="0.1.0", precision_bits=256, timestamp="2000-01-01T00:00:00Z")
    rep.add(make_check("a", Fraction(1, 7), Fraction(1, 7), Fraction(1, 10**12)))
    rep.add(make_check("b", 1, 2, Fraction(1, 2), notes="off by one"))
    assert not rep.passed
    path = tmp_path / "r.json"
    rep.write(str(path))
    data = json.loads(path.read_text())
    assert set(data) == {"tool_version", "timestamp", "precision_bits", "checks"}
    assert [c["passed"] for c in data["checks"]] == [True, False]
    for c in data["checks"]:
        # decimal strings only, never binary floats
        assert all(isinstance(c[k], str) for k in ("target", "computed", "tolerance"))
    assert data["checks"][1]["notes"] == "off by one"
    lines = rep.summary_lines()
    assert lines[0].startswith("PASS") and lines[1].startswith("FAIL")
