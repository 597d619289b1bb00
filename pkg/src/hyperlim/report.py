"""Machine-readable verification reports.

All numbers are serialized as decimal text, never as binary floats.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import mpmath
from mpmath import mpf

from .numerics import DEFAULT_PRECISION, _exact_sub_bits, _to_mpf, matched_digits, to_decimal

__all__ = ["Check", "VerificationReport", "make_check", "report_timestamp"]


@dataclass(frozen=True)
class Check:
    id: str
    target: str
    computed: str
    matched_digits: int
    tolerance: str
    passed: bool
    notes: str = ""


def _decimal_digits(prec: int) -> int:
    return int(prec * math.log10(2))


def _tolerance_text(tol: mpf) -> str:
    return "0" if tol == 0 else mpmath.nstr(tol, 20)


def make_check(check_id: str, computed, target, tolerance, prec: int = DEFAULT_PRECISION, notes: str = "") -> Check:
    """Compare ``computed`` with ``target``; passes iff the gap is <= ``tolerance``."""
    with mpmath.workprec(8 * DEFAULT_PRECISION):
        c, t, tol = _to_mpf(computed), _to_mpf(target), _to_mpf(tolerance)
    with mpmath.workprec(_exact_sub_bits(c, t)):
        gap = abs(c - t)
    passed = bool(gap <= tol)
    limit = _decimal_digits(prec)
    md = min(matched_digits(c, t), limit)
    tol_digits = 0 if tol == 0 else max(0, int(mpmath.ceil(-mpmath.log10(tol))))
    decimals = max(md + 2, min(tol_digits + 2, limit + 2), 12)
    return Check(
        id=check_id,
        target=to_decimal(t, decimals),
        computed=to_decimal(c, decimals),
        matched_digits=md,
        tolerance=_tolerance_text(tol),
        passed=passed,
        notes=notes,
    )


def report_timestamp() -> str:
    """UTC ISO-8601; ``SOURCE_DATE_EPOCH`` pins it for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc)
    return moment.replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class VerificationReport:
    tool_version: str
    precision_bits: int
    timestamp: str = field(default_factory=report_timestamp)
    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "precision_bits": self.precision_bits,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"{mark}  {c.id}: computed {_short(c.computed)} target {_short(c.target)} "
                         f"(digits {c.matched_digits}, tol {c.tolerance})")
        return lines


def _short(text: str, keep: int = 32) -> str:
    return text if len(text) <= keep else text[:keep] + "..."

