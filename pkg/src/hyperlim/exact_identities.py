"""Exact checks of the finite-N product identities used in the proofs.

Each identity is transcribed once, as two functions that feed factors into
an accumulator. ``ExactSide`` turns them into prime-exponent maps (the
check of record); ``LogSide`` sums logarithms at high precision and uses the
floating-point hyperfactorials from ``constants`` so the two routes share
nothing but the transcription.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable

import mpmath
from mpmath import mpf

from .constants import hyperfactorial_exact, ln_hyperfactorial
from .factored import ExponentAccumulator, FactoredRational
from .numerics import DEFAULT_PRECISION, GUARD_BITS, InvalidArgument, ResourceLimit, check_precision, round_to

__all__ = [
    "IDENTITIES",
    "ExactSide",
    "FactoredRational",
    "IdentityResult",
    "LogSide",
    "check_identity",
    "check_prop32_partial",
    "check_prop33_hyper",
    "check_prop33_inner",
    "check_prop34_double",
    "check_prop34_first",
    "check_prop34_middle",
    "check_prop34_rightmost",
    "identity_log_residual",
    "wallis_partial",
]

WALLIS_CAP = 10**5


@dataclass(frozen=True)
class IdentityResult:
    identity_id: str
    N: int
    holds: bool
    lhs_div_rhs: FactoredRational


class ExactSide:
    def __init__(self):
        self._acc = ExponentAccumulator()

    def mul(self, base: int, power: int = 1):
        self._acc.mul(base, power)

    def hyper(self, p: int, n: int, power: int = 1):
        self._acc.mul_factored(hyperfactorial_exact(p, n), power)

    def binom(self, n: int, k: int, power: int = 1):
        self._acc.mul(comb(n, k), power)

    def result(self) -> FactoredRational:
        return self._acc.result()


class LogSide:
    def __init__(self, prec: int):
        self.prec = prec
        self.total = mpf(0)

    def mul(self, base: int, power: int = 1):
        if power and base != 1:
            with mpmath.workprec(self.prec):
                self.total += power * mpmath.log(base)

    def hyper(self, p: int, n: int, power: int = 1):
        if power:
            value = ln_hyperfactorial(p, n, self.prec)
            with mpmath.workprec(self.prec):
                self.total += power * value

    def binom(self, n: int, k: int, power: int = 1):
        self.mul(comb(n, k), power)

    def result(self) -> mpf:
        return self.total


# transcriptions: each side(acc, N) multiplies its factors into acc

def _wallis(acc, N):
    for j in range(1, N + 1):
        acc.mul(2 * j, 2)
        acc.mul(2 * j - 1, -1)
        acc.mul(2 * j + 1, -1)


def _prop32_lhs(acc, N):
    for j in range(1, 2 * N + 1):
        sign = 1 if j % 2 else -1
        acc.mul(j + 1, sign)
        acc.mul(j, -sign)


def _prop33_inner_lhs(acc, N):
    acc.mul(2, -N)
    for j in range(N):
        for k in range(1, j + 1):
            acc.mul(2 * k - 1)
            acc.mul(2 * k + 1, 3)
            acc.mul(2 * k, -3)
            acc.mul(2 * k + 2, -1)


def _prop33_inner_rhs(acc, N):
    for k in range(1, N + 1):
        e1 = 2 * k - 2 * N - 1
        e2 = 2 * k - 2 * N
        acc.mul(2 * k, e1 + e2)
        acc.mul(2 * k - 1, -e1)
        acc.mul(2 * k + 1, -e2)


def _prop33_hyper_lhs(acc, N):
    for k in range(1, N + 1):
        acc.mul(2 * k, (2 * k - 1) + 2 * k)
        acc.mul(2 * k - 1, -(2 * k - 1))
        acc.mul(2 * k + 1, -2 * k)


def _prop33_hyper_rhs(acc, N):
    acc.mul(2, 4 * N * N + 4 * N + 1)
    acc.binom(2 * N, N)
    acc.mul(4 * N + 2)
    acc.hyper(1, N, 6)
    acc.hyper(1, N + 1, 2)
    acc.hyper(1, 2 * N, -1)
    acc.hyper(1, 2 * N + 2, -1)


def _prop34_double_lhs(acc, N):
    for j in range(N):
        for k in range(1, j + 1):
            acc.mul(2 * k - 1, 2 * k - 1 - 2 * j)
            acc.mul(2 * k + 1, 6 * k - 1 - 6 * j)
            acc.mul(2 * k, -(6 * k - 2 - 6 * j))
            acc.mul(2 * k + 2, -(2 * k - 2 * j))


def _prop34_double_rhs(acc, N):
    for k in range(1, N):
        acc.mul(2 * k, 3 * k * k - (6 * N - 1) * k + 3 * N * N - N)
        acc.mul(2 * k + 2, k * k - (2 * N - 1) * k + N * N - N)
        acc.mul(2 * k - 1, -(k * k - 2 * N * k + N * N))
        acc.mul(2 * k + 1, -(3 * k * k - (6 * N - 2) * k + 3 * N * N - 2 * N))


def _prop34_middle_lhs(acc, N):
    for k in range(1, N + 1):
        acc.mul(2 * k, 3)
        acc.mul(2 * k + 2)
        acc.mul(2 * k - 1, -1)
        acc.mul(2 * k + 1, -3)


def _prop34_middle_rhs(acc, N):
    acc.mul(2)
    acc.mul(2 * N + 1)
    acc.mul(2 * N + 2, -1)
    for k in range(1, N + 1):
        acc.mul(2 * k, 2)
        acc.mul(2 * k + 2, 2)
        acc.mul(2 * k + 1, -4)


def _prop34_rightmost_lhs(acc, N):
    for k in range(1, N + 1):
        acc.mul(2 * k - 1, 2 * k)
        acc.mul(2 * k + 1, 6 * k + 2)
        acc.mul(2 * k, -(6 * k + 1))
        acc.mul(2 * k + 2, -(2 * k + 1))


def _prop34_rightmost_rhs(acc, N):
    for k in range(1, N + 1):
        acc.mul(2 * k + 1, 2)
        acc.mul(2 * k, -1)
        acc.mul(2 * k + 2, -1)
    acc.mul(2, -(8 * N * N + 12 * N + 3))
    acc.mul(4 * N + 2, -1)
    acc.binom(2 * N + 2, N + 1, -2)
    acc.hyper(1, 2 * N)
    acc.hyper(1, 2 * N + 2, 3)
    acc.hyper(1, N, -8)
    acc.hyper(1, N + 1, -8)


def _first_two_power(N: int) -> int:
    # both sides are raised to the 12th power, clearing the 1/3, 1/4 denominators
    e = 12 * (Fraction(8, 3) * N**3 + 8 * N**2 + Fraction(22, 3) * N + Fraction(7, 4))
    assert e.denominator == 1, f"non-integral power of 2 at N={N}: {e}"
    return int(e)


def _prop34_first_lhs(acc, N):
    for k in range(1, N + 1):
        acc.mul(2 * k, 12 * (3 * k * k + k))
        acc.mul(2 * k + 2, 12 * (k * k + k))
        acc.mul(2 * k - 1, -12 * k * k)
        acc.mul(2 * k + 1, -12 * (3 * k * k + 2 * k))


def _prop34_first_rhs(acc, N):
    acc.mul(2, _first_two_power(N))
    acc.mul(4 * N + 2, 3)
    acc.hyper(1, N, 24)
    acc.hyper(1, 2 * N + 2, 6)
    acc.hyper(2, N, 48)
    acc.hyper(2, N + 1, 48)
    acc.hyper(1, N + 1, -24)
    acc.hyper(1, 2 * N, -6)
    acc.hyper(2, 2 * N, -3)
    acc.hyper(2, 2 * N + 2, -9)


@dataclass(frozen=True)
class _Identity:
    lhs: Callable
    rhs: Callable
    n_min: int
    n_max: int
    anchor: str


IDENTITIES: dict[str, _Identity] = {
    "prop32_partial": _Identity(_prop32_lhs, _wallis, 1, WALLIS_CAP, "alternating prod (1+1/j)^(+-1), j <= 2N, equals the Wallis partial product"),
    "prop33_inner": _Identity(_prop33_inner_lhs, _prop33_inner_rhs, 1, 200, "double product over j < N, k <= j collapses to a single product (M = 2)"),
    "prop33_hyper": _Identity(_prop33_hyper_lhs, _prop33_hyper_rhs, 1, 200, "prod (2k/(2k-1))^(2k-1) (2k/(2k+1))^(2k) via H(N), H(N+1), H(2N), H(2N+2)"),
    "prop34_double": _Identity(_prop34_double_lhs, _prop34_double_rhs, 2, 120, "double product over j < N, k <= j collapses to a single product (M = 3)"),
    "prop34_middle": _Identity(_prop34_middle_lhs, _prop34_middle_rhs, 1, 10**4, "prod (2k)^3 (2k+2)/((2k-1)(2k+1)^3) via a squared Wallis-type product"),
    "prop34_rightmost": _Identity(_prop34_rightmost_lhs, _prop34_rightmost_rhs, 1, 120, "prod with exponents linear in k via H and a central binomial"),
    "prop34_first": _Identity(_prop34_first_lhs, _prop34_first_rhs, 1, 60, "prod with exponents quadratic in k via H and H_2 (12th powers)"),
}


def _validate(identity_id: str, N) -> _Identity:
    try:
        ident = IDENTITIES[identity_id]
    except KeyError:
        raise InvalidArgument(f"unknown identity {identity_id!r}; known: {', '.join(IDENTITIES)}") from None
    if isinstance(N, bool) or not isinstance(N, int) or N < ident.n_min:
        raise InvalidArgument(f"{identity_id} needs an integer N >= {ident.n_min}, got {N!r}")
    if N > ident.n_max:
        raise ResourceLimit(f"{identity_id} is capped at N = {ident.n_max}, got {N}")
    return ident


def check_identity(identity_id: str, N: int) -> IdentityResult:
    """Build both sides as exponent maps and compare them."""
    ident = _validate(identity_id, N)
    lhs, rhs = ExactSide(), ExactSide()
    ident.lhs(lhs, N)
    ident.rhs(rhs, N)
    ratio = lhs.result() / rhs.result()
    return IdentityResult(identity_id, N, ratio.is_one(), ratio)


def identity_log_residual(identity_id: str, N: int, prec: int = DEFAULT_PRECISION) -> tuple[mpf, mpf]:
    """(ln LHS - ln RHS, ln LHS) with both sides summed in floating point."""
    check_precision(prec)
    ident = _validate(identity_id, N)
    wp = prec + GUARD_BITS
    lhs, rhs = LogSide(wp), LogSide(wp)
    ident.lhs(lhs, N)
    ident.rhs(rhs, N)
    with mpmath.workprec(wp):
        diff = lhs.result() - rhs.result()
    return round_to(diff, prec), round_to(lhs.result(), prec)


def wallis_partial(N: int) -> FactoredRational:
    """prod_{j=1}^{N} (2j)^2 / ((2j-1)(2j+1))."""
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise InvalidArgument(f"N must be a positive integer, got {N!r}")
    if N > WALLIS_CAP:
        raise ResourceLimit(f"wallis_partial is capped at N = {WALLIS_CAP}, got {N}")
    acc = ExactSide()
    _wallis(acc, N)
    return acc.result()


def check_prop32_partial(N: int) -> IdentityResult:
    return check_identity("prop32_partial", N)


def check_prop33_inner(N: int) -> IdentityResult:
    return check_identity("prop33_inner", N)


def check_prop33_hyper(N: int) -> IdentityResult:
    return check_identity("prop33_hyper", N)


def check_prop34_double(N: int) -> IdentityResult:
    return check_identity("prop34_double", N)


def check_prop34_middle(N: int) -> IdentityResult:
    return check_identity("prop34_middle", N)


def check_prop34_rightmost(N: int) -> IdentityResult:
    return check_identity("prop34_rightmost", N)


def check_prop34_first(N: int) -> IdentityResult:
    return check_identity("prop34_first", N)
