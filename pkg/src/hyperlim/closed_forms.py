"""Explicit values of e_{M,2s} for M <= 3.

Each value is ln of (finite rational product) * 2^a * pi^b * e^c * A^d * B^f.
The product is kept as an exact exponent map and the transcendental factors
as exact rational exponents, so the forms can be compared structurally as
well as evaluated numerically. A and B enter only as caller-supplied values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mpf

from .factored import ExponentAccumulator, FactoredRational
from .numerics import DEFAULT_PRECISION, GUARD_BITS, InvalidArgument, check_precision, round_to

__all__ = [
    "ClosedForm",
    "closed_form",
    "e0_closed",
    "e1_closed",
    "e2_closed",
    "e3_closed",
    "e_closed",
    "evaluate",
]


@dataclass(frozen=True)
class ClosedForm:
    """ln( rational * 2^two * pi^pi_ * e^e_ * A^A_ * B^B_ ), powers of 2 held apart."""

    rational: FactoredRational = field(default_factory=FactoredRational.one)
    two: Fraction = Fraction(0)
    pi_: Fraction = Fraction(0)
    e_: Fraction = Fraction(0)
    A_: int = 0
    B_: int = 0

    def __post_init__(self):
        exps = self.rational.exponents
        if 2 in exps:
            object.__setattr__(self, "two", Fraction(self.two) + exps.pop(2))
            object.__setattr__(self, "rational", FactoredRational._trusted(exps))

    def _combine(self, other: "ClosedForm", sign: int) -> "ClosedForm":
        rat = self.rational * other.rational if sign > 0 else self.rational / other.rational
        return ClosedForm(
            rat,
            self.two + sign * other.two,
            self.pi_ + sign * other.pi_,
            self.e_ + sign * other.e_,
            self.A_ + sign * other.A_,
            self.B_ + sign * other.B_,
        )

    def __add__(self, other: "ClosedForm") -> "ClosedForm":
        return self._combine(other, 1)

    def __sub__(self, other: "ClosedForm") -> "ClosedForm":
        return self._combine(other, -1)

    def is_zero(self) -> bool:
        return self.rational.is_one() and not (self.two or self.pi_ or self.e_ or self.A_ or self.B_)


def _check_index(index) -> int:
    if isinstance(index, bool) or not isinstance(index, int) or index < 2 or index % 2:
        raise InvalidArgument(f"index must be an even integer >= 2, got {index!r}")
    return index


def _form0(s: int) -> ClosedForm:
    acc = ExponentAccumulator()
    acc.mul(s + 1)
    acc.mul(s, -1)
    return ClosedForm(acc.result())


def _form1(index: int) -> ClosedForm:
    acc = ExponentAccumulator()
    if index % 4 == 2:
        s = (index - 2) // 4
        for k in range(1, s + 1):
            acc.mul(2 * k - 1)
            acc.mul(2 * k + 1)
            acc.mul(2 * k, -2)
        return ClosedForm(acc.result(), two=Fraction(-1), pi_=Fraction(1))
    s = (index - 4) // 4
    for k in range(1, s + 1):
        acc.mul(2 * k)
        acc.mul(2 * k + 2)
        acc.mul(2 * k + 1, -2)
    return ClosedForm(acc.result(), two=Fraction(2), pi_=Fraction(-1))


def _form2(index: int) -> ClosedForm:
    acc = ExponentAccumulator()
    if index % 4 == 2:
        s = (index - 2) // 4
        for k in range(1, s):
            acc.mul(2 * k - 1, k - s)
            acc.mul(2 * k + 1, 3 * k - 3 * s)
            acc.mul(2 * k, -(3 * k - 3 * s))
            acc.mul(2 * k + 2, -(k - s))
        return ClosedForm(
            acc.result(),
            two=3 * s - Fraction(1, 6),
            pi_=-(2 * s + Fraction(1, 2)),
            e_=Fraction(-1, 2),
            A_=6,
        )
    s = (index - 4) // 4
    for k in range(1, s + 1):
        acc.mul(2 * k, 3 * k - 3 * s - 2)
        acc.mul(2 * k + 2, k - s)
        acc.mul(2 * k - 1, -(k - s - 1))
        acc.mul(2 * k + 1, -(3 * k - 3 * s - 1))
    return ClosedForm(
        acc.result(),
        two=-(3 * s + Fraction(5, 6)),
        pi_=2 * s + Fraction(3, 2),
        e_=Fraction(1, 2),
        A_=-6,
    )


def _form3(index: int) -> ClosedForm:
    # Both branches use k = 1..s-1 as printed; the k = s factor has all
    # exponents equal to zero, so extending the range changes nothing.
    acc = ExponentAccumulator()
    if index % 4 == 2:
        s = (index - 2) // 4
        for k in range(1, s):
            acc.mul(2 * k - 1, k * k - 2 * s * k + s * s)
            acc.mul(2 * k + 1, 3 * k * k - (6 * s - 2) * k + 3 * s * s - 2 * s)
            acc.mul(2 * k, -(3 * k * k - (6 * s - 1) * k + 3 * s * s - s))
            acc.mul(2 * k + 2, -(k * k - (2 * s - 1) * k + s * s - s))
        return ClosedForm(
            acc.result(),
            two=-(3 * s * s - Fraction(7, 3) * s),
            pi_=Fraction(2 * s * s),
            e_=Fraction(s),
            A_=-12 * s,
            B_=7,
        )
    s = (index - 4) // 4
    for k in range(1, s):
        acc.mul(2 * k, 3 * k * k - (6 * s + 2) * k + 3 * s * s + 2 * s)
        acc.mul(2 * k + 2, k * k - 2 * s * k + s * s)
        acc.mul(2 * k - 1, -(k * k - (2 * s + 1) * k + s * s + s))
        acc.mul(2 * k + 1, -(3 * k * k - (6 * s + 1) * k + 3 * s * s + s))
    return ClosedForm(
        acc.result(),
        two=3 * s * s + Fraction(2, 3) * s - Fraction(1, 6),
        pi_=-(2 * s * s + 2 * s + Fraction(1, 2)),
        e_=-(s + Fraction(1, 2)),
        A_=12 * s + 6,
        B_=-7,
    )


def closed_form(M: int, index: int) -> ClosedForm:
    """Exact structure of e_{M,index}."""
    index = _check_index(index)
    if M == 0:
        return _form0(index // 2)
    if M == 1:
        return _form1(index)
    if M == 2:
        return _form2(index)
    if M == 3:
        return _form3(index)
    raise InvalidArgument(f"closed forms exist for M in 0..3, got {M!r}")


def _frac(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def evaluate(form: ClosedForm, prec: int = DEFAULT_PRECISION, log_A=None, log_B=None) -> mpf:
    """Numerical value of a closed form given ln A and ln B where needed."""
    check_precision(prec)
    if form.A_ and log_A is None:
        raise InvalidArgument("this closed form needs a value for A")
    if form.B_ and log_B is None:
        raise InvalidArgument("this closed form needs a value for B")
    wp = prec + GUARD_BITS + 16
    rat = form.rational.log(wp)
    with mpmath.workprec(wp):
        total = rat
        if form.two:
            total += _frac(form.two) * mpmath.ln2
        if form.pi_:
            total += _frac(form.pi_) * mpmath.log(mpmath.pi)
        if form.e_:
            total += _frac(form.e_)
        if form.A_:
            total += form.A_ * mpf(log_A)
        if form.B_:
            total += form.B_ * mpf(log_B)
    return round_to(total, prec)


def _positive_log(x, name: str, prec: int) -> mpf:
    with mpmath.workprec(prec + GUARD_BITS):
        x = mpf(x)
        if not x > 0:
            raise InvalidArgument(f"{name} must be positive, got {x}")
        return mpmath.log(x)


def e0_closed(s: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """ln(1 + 1/s)."""
    check_precision(prec)
    if isinstance(s, bool) or not isinstance(s, int) or s < 1:
        raise InvalidArgument(f"e_{{0,2s}} needs s >= 1 (s = 0 diverges), got {s!r}")
    with mpmath.workprec(prec + GUARD_BITS):
        value = mpmath.log1p(mpf(1) / s)
    return round_to(value, prec)


def e1_closed(index: int, prec: int = DEFAULT_PRECISION) -> mpf:
    return evaluate(closed_form(1, index), prec)


def e2_closed(index: int, A_value, prec: int = DEFAULT_PRECISION) -> mpf:
    form = closed_form(2, index)
    return evaluate(form, prec, log_A=_positive_log(A_value, "A", prec))


def e3_closed(index: int, A_value, B_value, prec: int = DEFAULT_PRECISION) -> mpf:
    form = closed_form(3, index)
    log_A = _positive_log(A_value, "A", prec) if form.A_ else None
    return evaluate(form, prec, log_A=log_A, log_B=_positive_log(B_value, "B", prec))


def e_closed(M: int, index: int, prec: int = DEFAULT_PRECISION, log_A=None, log_B=None) -> mpf:
    """Dispatch on M; A and B are passed as logarithms."""
    if M == 0:
        return e0_closed(_check_index(index) // 2, prec)
    return evaluate(closed_form(M, index), prec, log_A=log_A, log_B=log_B)
