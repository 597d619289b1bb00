"""The alpha-series e_{M,2s}(alpha) and its alpha -> 0+ limit.

    e_{M,2s}(alpha) = sum_{n>=1} (1/n) (1 - q^n) / (1 + q^n)^M * q^(s n),   q = exp(-2 alpha)

Since (1 - q^n) <= 1 and (1 + q^n)^(-M) <= 1, every summand is bounded by
q^(s n)/n, which gives the geometric tail bound

    sum_{n>N0} q^(s n)/n <= q^(s (N0+1)) / ((N0+1) (1 - q^s)).

For s = 0 the summand tends to 1/n and the series diverges for every M, so
partial sums and limits require s >= 1. The termwise recursion still makes
sense at s = 0 and is accepted there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .numerics import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    ConstantEstimate,
    ExtrapolationConfig,
    InvalidArgument,
    ResourceLimit,
    check_precision,
    richardson_extrapolate,
    round_to,
)

__all__ = [
    "DEFAULT_ALPHA0",
    "DEFAULT_E_CONFIG",
    "MAX_TERMS",
    "EIndex",
    "SeriesValue",
    "e_limit",
    "e_partial",
    "e_term",
    "partial_sum",
    "recursion_residual",
    "terms_for_tolerance",
]

MAX_TERMS = 10**8
DEFAULT_ALPHA0 = Fraction(1, 8)
DEFAULT_E_CONFIG = ExtrapolationConfig(depth=6, schedule_ratio=2, leading_power=Fraction(1))


@dataclass(frozen=True)
class EIndex:
    """Denominator power ``M`` and half-exponent ``s`` of e_{M,2s}."""

    M: int
    s: int

    def __post_init__(self):
        if not isinstance(self.M, int) or self.M not in (0, 1, 2, 3):
            raise InvalidArgument(f"M must be in 0..3, got {self.M!r}")
        if not isinstance(self.s, int) or self.s < 0:
            raise InvalidArgument(f"s must be a non-negative integer, got {self.s!r}")

    @classmethod
    def from_index(cls, M: int, index: int) -> "EIndex":
        """Build from the even exponent index 2s used in e_{M,2s}."""
        if not isinstance(index, int) or index < 2 or index % 2:
            raise InvalidArgument(f"index must be an even integer >= 2, got {index!r}")
        return cls(M, index // 2)

    @property
    def index(self) -> int:
        return 2 * self.s


@dataclass(frozen=True)
class SeriesValue:
    """Truncated sum with a rigorous bound on what was left out.

    ``tail_bound`` also absorbs the accumulated rounding of the partial sum,
    so the true value lies in ``[value - tail_bound, value + tail_bound]``.
    """

    value: mpf
    tail_bound: mpf
    terms_used: int
    alpha: mpf | None = None


def _alpha(alpha, prec: int = 4 * DEFAULT_PRECISION) -> mpf:
    # never round a caller's mpf down to the ambient context precision
    if isinstance(alpha, mpf):
        a = alpha
    else:
        with mpmath.workprec(prec):
            a = mpf(alpha) if not isinstance(alpha, Fraction) else mpf(alpha.numerator) / alpha.denominator
    if not a > 0:
        raise InvalidArgument(f"alpha must be positive, got {alpha!r}")
    return a


def e_term(idx: EIndex, n: int, alpha, prec: int = DEFAULT_PRECISION) -> mpf:
    """Summand (1/n)(1 - q^n)(1 + q^n)^(-M) q^(s n) with q = exp(-2 alpha)."""
    check_precision(prec)
    if not isinstance(n, int) or n < 1:
        raise InvalidArgument(f"n must be a positive integer, got {n!r}")
    with mpmath.workprec(prec + GUARD_BITS):
        a = _alpha(alpha)
        qn = mpmath.exp(-2 * n * a)
        one_minus = -mpmath.expm1(-2 * n * a)
        value = one_minus / (1 + qn) ** idx.M * mpmath.exp(-2 * idx.s * n * a) / n
    return round_to(value, prec)


def _tail_bound(qs: mpf, n0: int) -> mpf:
    return qs ** (n0 + 1) / ((n0 + 1) * (1 - qs))


def terms_for_tolerance(s: int, alpha, tol) -> int:
    """Smallest N0 whose geometric tail bound is <= ``tol``."""
    a = _alpha(alpha)
    tol = mpf(tol)
    with mpmath.workprec(64):
        qs = mpmath.exp(-2 * s * a)
        rate = 2 * s * a
        # q^{s(N0+1)} / (1 - q^s) <= tol  is sufficient; refine from there
        guess = mpmath.log(1 / (tol * (1 - qs))) / rate - 1
        n0 = max(0, int(mpmath.floor(guess)) - 2)
        step = max(1, n0 // 64)
        while n0 > 0 and _tail_bound(qs, n0 - step) <= tol:
            n0 -= step
        while _tail_bound(qs, n0) > tol:
            n0 += 1
        while n0 > 0 and _tail_bound(qs, n0 - 1) <= tol:
            n0 -= 1
    return n0


def partial_sum(idx: EIndex, alpha, n_terms: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """sum_{n=1}^{n_terms} e_term, ascending, rounded to ``prec``."""
    check_precision(prec)
    a = _alpha(alpha)
    return round_to(_sum_terms(idx, a, n_terms, prec + GUARD_BITS + n_terms.bit_length()), prec)


def _sum_terms(idx: EIndex, a: mpf, n_terms: int, wp: int) -> mpf:
    M, s = idx.M, idx.s
    with mpmath.workprec(wp):
        q = mpmath.exp(-2 * a)
        qs = q**s
        qn = mpf(1)
        qsn = mpf(1)
        total = mpf(0)
        for n in range(1, n_terms + 1):
            qn *= q
            qsn *= qs
            denom = 1 + qn
            if M == 0:
                t = (1 - qn) * qsn
            elif M == 1:
                t = (1 - qn) * qsn / denom
            elif M == 2:
                t = (1 - qn) * qsn / (denom * denom)
            else:
                t = (1 - qn) * qsn / (denom * denom * denom)
            total += t / n
    return total


def e_partial(
    idx: EIndex,
    alpha,
    tol,
    prec: int = DEFAULT_PRECISION,
    max_terms: int = MAX_TERMS,
) -> SeriesValue:
    """Partial sum of e_{M,2s}(alpha) with tail bound <= ``tol``.

    Raises ``ResourceLimit`` (carrying the capped partial sum) when more than
    ``max_terms`` terms would be needed.
    """
    check_precision(prec)
    if idx.s < 1:
        raise InvalidArgument("e_{M,0} diverges for every M; s must be >= 1 for sums")
    a = _alpha(alpha)
    tol = mpf(tol)
    if not tol > 0:
        raise InvalidArgument(f"tol must be positive, got {tol!r}")
    # rounding allowance: first term bound is 1, sum <= -ln(1 - q^s)
    with mpmath.workprec(64):
        scale = max(mpf(1), -mpmath.log(-mpmath.expm1(-2 * idx.s * a)))
    rounding = scale * mpf(2) ** (-prec + 1)
    if rounding >= tol / 2:
        raise InvalidArgument(
            f"tol={mpmath.nstr(tol, 5)} is below what {prec}-bit arithmetic can certify"
        )
    n0 = terms_for_tolerance(idx.s, a, tol - rounding)
    capped = n0 > max_terms
    n_used = min(n0, max_terms)
    wp = prec + GUARD_BITS + n_used.bit_length()
    total = _sum_terms(idx, a, n_used, wp)
    with mpmath.workprec(wp):
        qs = mpmath.exp(-2 * idx.s * a)
        trunc = _tail_bound(qs, n_used)
        bound = trunc * (1 + mpf(2) ** -20) + rounding
    result = SeriesValue(round_to(total, prec), round_to(bound, 64), n_used, a)
    if capped:
        raise ResourceLimit(
            f"e_partial(M={idx.M}, s={idx.s}) needs {n0} terms, cap is {max_terms}", partial=result
        )
    return result


def e_limit(
    idx: EIndex,
    config: ExtrapolationConfig | None = None,
    prec: int = DEFAULT_PRECISION,
    alpha0=DEFAULT_ALPHA0,
    max_terms: int = MAX_TERMS,
) -> ConstantEstimate:
    """Richardson estimate of e_{M,2s} = lim_{alpha -> 0+} e_{M,2s}(alpha).

    Samples alpha_j = alpha0 / ratio^j, j = 0..samples-1. The finite-alpha sum
    has an expansion in integer powers of alpha (Euler-Maclaurin), so the
    default assumes leading power 1.
    """
    check_precision(prec)
    config = config or DEFAULT_E_CONFIG
    if idx.s < 1:
        raise InvalidArgument("e_{M,0} diverges; s must be >= 1")
    a0 = _alpha(alpha0)
    tol = mpf(2) ** (-prec + 6)
    samples = []
    for j in range(config.samples):
        with mpmath.workprec(prec + GUARD_BITS):
            a = a0 / mpf(config.schedule_ratio) ** j
        sv = e_partial(idx, a, tol, prec=prec + 16, max_terms=max_terms)
        samples.append((a, sv.value))
    est = richardson_extrapolate(samples, config, prec=prec, label=f"e_{{{idx.M},{idx.index}}}")
    est.metadata.update({"M": idx.M, "index": idx.index, "alpha0": str(alpha0), "sample_values": [v for _, v in samples]})
    return est


def recursion_residual(M: int, s: int, alpha, n_max: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """max_{n <= n_max} |e_term(M,s) + e_term(M,s+1) - e_term(M-1,s)|.

    The termwise identity is exact, so the result is pure rounding noise of
    the three independently rounded summands.
    """
    check_precision(prec)
    if M not in (1, 2, 3):
        raise InvalidArgument(f"M must be in 1..3, got {M!r}")
    if not isinstance(n_max, int) or n_max < 1:
        raise InvalidArgument(f"n_max must be a positive integer, got {n_max!r}")
    hi, lo_s, lo_m = EIndex(M, s), EIndex(M, s + 1), EIndex(M - 1, s)
    worst = mpf(0)
    with mpmath.workprec(prec):
        for n in range(1, n_max + 1):
            r = abs(e_term(hi, n, alpha, prec) + e_term(lo_s, n, alpha, prec) - e_term(lo_m, n, alpha, prec))
            if r > worst:
                worst = r
    return worst
