"""Auxiliary limits and the proof-internal sub-limits.

Every infinite sum here is evaluated as explicit terms plus an
Euler-Maclaurin tail (``tails.sum_with_tail``); all summands are completely
monotone up to sign, so the tail bound is the first omitted correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mpf

from .numerics import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    ConstantEstimate,
    ExtrapolationConfig,
    InvalidArgument,
    check_precision,
    matched_digits,
    richardson_extrapolate,
    round_to,
)
from .series_limits import SeriesValue
from .tails import Kernel, sum_with_tail

__all__ = [
    "LEMMA_CONFIG",
    "LemmaReport",
    "lemma1_kernel",
    "lemma1_limit",
    "lemma1_sum",
    "lemma3_limit",
    "lemma3_value",
    "lemma4_limit",
    "lemma4_value",
    "sublimit_combined_limit",
    "sublimit_n1",
    "sublimit_n1_limit",
    "sublimit_n2",
    "sublimit_n2_limit",
    "tail_product_half",
    "tail_product_half_limit",
]

LEMMA_CONFIG = ExtrapolationConfig(depth=6, schedule_ratio=2, leading_power=Fraction(1))
SUBLIMIT_CONFIG = ExtrapolationConfig(depth=8, schedule_ratio=2, leading_power=Fraction(1))


@dataclass(frozen=True)
class LemmaReport:
    lemma_id: str
    parameters: dict
    computed: ConstantEstimate
    target: mpf
    matched_digits: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "matched_digits", matched_digits(self.computed.value, self.target))


def _report(lemma_id, parameters, est, target) -> LemmaReport:
    # exact targets arrive as Fractions and are rounded at the estimate's precision
    if isinstance(target, Fraction):
        with mpmath.workprec(8 * DEFAULT_PRECISION):
            target = mpf(target.numerator) / target.denominator
    return LemmaReport(lemma_id, parameters, est, target)


def _as_exact(d):
    if isinstance(d, (int, Fraction)):
        return Fraction(d)
    if isinstance(d, str):
        return Fraction(d)
    return None


def _series(kernel: Kernel, start: int, tol, prec: int, scale=1, partial=None) -> SeriesValue:
    wp = prec + GUARD_BITS + 64
    with mpmath.workprec(wp):
        tol = mpf(tol)
        if not tol > 0:
            raise InvalidArgument("tol must be positive")
        scale = mpf(scale) if not isinstance(scale, Fraction) else mpf(scale.numerator) / scale.denominator
        value, bound, used = sum_with_tail(kernel, start, tol / (4 * abs(scale)), partial=partial)
        value *= scale
        bound = bound * abs(scale) + abs(value) * mpf(2) ** (-prec)
    return SeriesValue(round_to(value, prec), round_to(bound, 64), used)


# shifted reciprocal-product sums

def lemma1_kernel(N: int, c) -> Kernel:
    """prod_{j=1}^{N+1} 1/(2k + j + c) as partial fractions in v = 2k + c."""
    terms = {}
    for j in range(1, N + 2):
        coef = Fraction(1)
        for i in range(1, N + 2):
            if i != j:
                coef /= i - j
        terms[("inv", j, 1)] = coef
    return Kernel(terms, c)


def lemma1_sum(N: int, s: int, d=0, tol=mpf(10) ** -30, prec: int = DEFAULT_PRECISION) -> SeriesValue:
    """sum_{k>=1} prod_{j=1}^{N+1} 1/(2k + j + d + 2s).

    Rational ``d`` keeps the explicit head of the sum exact (Fractions);
    other real ``d`` use floating evaluation of the same terms.
    """
    check_precision(prec)
    if not isinstance(N, int) or N < 1:
        raise InvalidArgument(f"N must be a positive integer, got {N!r}")
    if not isinstance(s, int) or s < 0:
        raise InvalidArgument(f"s must be a non-negative integer, got {s!r}")
    exact_d = _as_exact(d)
    c = exact_d + 2 * s if exact_d is not None else mpf(d) + 2 * s
    if not 3 + c > 0:
        raise InvalidArgument("denominators must be positive: need 3 + d + 2s > 0")
    kernel = lemma1_kernel(N, c)

    partial = None
    if exact_d is not None:
        def partial(start, K):
            total = Fraction(0)
            for k in range(start, K):
                t = Fraction(1)
                for j in range(1, N + 2):
                    t /= 2 * k + j + c
                total += t
            return mpf(total.numerator) / total.denominator

    return _series(kernel, 1, tol, prec, partial=partial)


def lemma1_limit(N: int, d=0, config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, s0: int = 16) -> LemmaReport:
    """Extrapolate s^N * lemma1_sum(N, s, d) over s = s0 * 2^j; target 1/(2N 2^N)."""
    config = config or LEMMA_CONFIG
    samples = []
    for j in range(config.samples):
        s = s0 * config.schedule_ratio**j
        sv = lemma1_sum(N, s, d, tol=mpf(2) ** (-prec - 8) / mpf(s) ** N, prec=prec + 16)
        with mpmath.workprec(prec + GUARD_BITS):
            samples.append((s, mpf(s) ** N * sv.value))
    est = richardson_extrapolate(samples, config, prec=prec, label=f"lemma1 N={N} d={d}")
    target = Fraction(1, 2 * N * 2**N)
    return _report("lemma1", {"N": N, "d": str(d), "s0": s0}, est, target)


# l'Hopital-type limits at x -> infinity

def _check_x(x, prec: int) -> mpf:
    check_precision(prec)
    if not isinstance(x, mpf):
        with mpmath.workprec(prec + GUARD_BITS):
            x = mpf(x) if not isinstance(x, Fraction) else mpf(x.numerator) / x.denominator
    if not x > 0:
        raise InvalidArgument(f"x must be positive, got {x}")
    need = 2 * max(0, int(mpmath.ceil(mpmath.log(x, 2)))) + 96
    if prec < need:
        raise InvalidArgument(f"x = {mpmath.nstr(x, 6)} needs at least {need} bits, got {prec}")
    return x


def lemma3_value(x, prec: int = DEFAULT_PRECISION) -> mpf:
    """x (1 - x ln(1 + 1/x))."""
    x = _check_x(x, prec)
    with mpmath.workprec(prec + GUARD_BITS):
        value = x * (1 - x * mpmath.log1p(1 / x))
    return round_to(value, prec)


def lemma4_value(x, prec: int = DEFAULT_PRECISION) -> mpf:
    """x^2 (1 - (x + 1/2) ln(1 + 1/x))."""
    x = _check_x(x, prec)
    with mpmath.workprec(prec + GUARD_BITS):
        value = x * x * (1 - (x + mpf(1) / 2) * mpmath.log1p(1 / x))
    return round_to(value, prec)


def _x_limit(fn, lemma_id, target, config, prec, j0):
    config = config or ExtrapolationConfig(depth=8, schedule_ratio=2, leading_power=Fraction(1))
    xs = [mpf(config.schedule_ratio) ** (j0 + j) for j in range(config.samples)]
    samples = [(x, fn(x, prec)) for x in xs]
    est = richardson_extrapolate(samples, config, prec=prec, label=lemma_id)
    return _report(lemma_id, {"x0": str(xs[0])}, est, target)


def lemma3_limit(config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, j0: int = 4) -> LemmaReport:
    return _x_limit(lemma3_value, "lemma3", Fraction(1, 2), config, prec, j0)


def lemma4_limit(config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, j0: int = 4) -> LemmaReport:
    return _x_limit(lemma4_value, "lemma4", Fraction(-1, 12), config, prec, j0)


# Tail product behind e^{1/2}

def _half_kernel() -> Kernel:
    # 2 ln(2k) - ln(2k - 1) - ln(2k + 1) = -ln(1 - 1/(4k^2))
    return Kernel({("log", 0, 0): 2, ("log", -1, 0): -1, ("log", 1, 0): -1}, 0)


def tail_product_half(N: int, tol=mpf(10) ** -30, prec: int = DEFAULT_PRECISION) -> SeriesValue:
    """ln prod_{k>N} ((2k)^2/((2k-1)(2k+1)))^(2N) = 2N sum_{k>N} -ln(1 - 1/(4k^2))."""
    check_precision(prec)
    if not isinstance(N, int) or N < 1:
        raise InvalidArgument(f"N must be a positive integer, got {N!r}")
    return _series(_half_kernel(), N + 1, tol, prec, scale=2 * N)


def tail_product_half_limit(config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, N0: int = 16) -> LemmaReport:
    config = config or LEMMA_CONFIG
    samples = []
    for j in range(config.samples):
        N = N0 * config.schedule_ratio**j
        samples.append((N, tail_product_half(N, tol=mpf(2) ** (-prec - 8), prec=prec + 16).value))
    est = richardson_extrapolate(samples, config, prec=prec, label="tail_half")
    return _report("tail_half", {"N0": N0}, est, Fraction(1, 2))


# Sub-limits behind e^{1/8}

def _n2_kernel(x) -> Kernel:
    # ln(u-3) + 3 ln(u-1) - 3 ln(u-2) - ln(u), u = 2k + 2x
    return Kernel({("log", -3, 0): 1, ("log", -1, 0): 3, ("log", -2, 0): -3, ("log", 0, 0): -1}, 2 * x)


def _n1_kernel(x) -> Kernel:
    # (3u-5) ln(u-2) + (u-1) ln u - (u-2) ln(u-3) - (3u-4) ln(u-1), written via
    # (a u + b) ln(u + c) = a (u+c) ln(u+c) + (b - a c) ln(u+c)
    terms = {}
    for a, b, c in ((3, -5, -2), (1, -1, 0), (-1, 2, -3), (-3, 4, -1)):
        terms[("log", c, 1)] = terms.get(("log", c, 1), 0) + a
        terms[("log", c, 0)] = terms.get(("log", c, 0), 0) + (b - a * c)
    return Kernel(terms, 2 * x)


def _check_sub_x(x) -> mpf | Fraction:
    ex = _as_exact(x)
    val = ex if ex is not None else mpf(x)
    if not val >= 2:
        raise InvalidArgument(f"x must be >= 2, got {x!r}")
    return val


def sublimit_n2(x, tol=mpf(10) ** -30, prec: int = DEFAULT_PRECISION) -> SeriesValue:
    """x^2 sum_{k>=1} [ln(2k+2x-3) + 3 ln(2k+2x-1) - 3 ln(2k+2x-2) - ln(2k+2x)]."""
    check_precision(prec)
    x = _check_sub_x(x)
    return _series(_n2_kernel(x), 1, tol, prec, scale=x * x)


def sublimit_n1(x, tol=mpf(10) ** -30, prec: int = DEFAULT_PRECISION) -> SeriesValue:
    """x sum_{k>=1} [(6k+6x-5) ln(2k+2x-2) + (2k+2x-1) ln(2k+2x)
    - (2k+2x-2) ln(2k+2x-3) - (6k+6x-4) ln(2k+2x-1)]."""
    check_precision(prec)
    x = _check_sub_x(x)
    return _series(_n1_kernel(x), 1, tol, prec, scale=x)


def _sub_samples(fns, config, prec, x0):
    samples = []
    for j in range(config.samples):
        x = Fraction(x0) * config.schedule_ratio**j
        with mpmath.workprec(prec + GUARD_BITS):
            val = sum((fn(x, tol=mpf(2) ** (-prec - 8), prec=prec + 16).value for fn in fns), mpf(0))
        samples.append((mpf(x.numerator) / x.denominator, val))
    return samples


def sublimit_n2_limit(config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, x0=4) -> LemmaReport:
    config = config or SUBLIMIT_CONFIG
    est = richardson_extrapolate(_sub_samples([sublimit_n2], config, prec, x0), config, prec=prec, label="sublimit_n2")
    return _report("sublimit_n2", {"x0": str(x0)}, est, Fraction(-1, 8))


def sublimit_n1_limit(config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, x0=4) -> LemmaReport:
    config = config or SUBLIMIT_CONFIG
    est = richardson_extrapolate(_sub_samples([sublimit_n1], config, prec, x0), config, prec=prec, label="sublimit_n1")
    return _report("sublimit_n1", {"x0": str(x0)}, est, Fraction(1, 4))


def sublimit_combined_limit(config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, x0=4) -> LemmaReport:
    """Limit of the product of both tail factors; target e^{1/8}."""
    config = config or SUBLIMIT_CONFIG
    samples = _sub_samples([sublimit_n2, sublimit_n1], config, prec, x0)
    log_est = richardson_extrapolate(samples, config, prec=prec, label="sublimit_combined")
    with mpmath.workprec(prec + GUARD_BITS):
        value = mpmath.exp(log_est.value)
        est = ConstantEstimate(
            value=round_to(value, prec),
            error_estimate=round_to(value * log_est.error_estimate, prec),
            config=config,
            label="sublimit_combined",
            metadata={"log_value": log_est.value},
        )
        target = mpmath.exp(mpf(1) / 8)
    return _report("sublimit_combined", {"x0": str(x0)}, est, target)
