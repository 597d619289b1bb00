"""Precision handling, reference constants and Richardson extrapolation.

Real numbers are plain ``mpmath.mpf`` values; the working precision travels
alongside them as an explicit ``prec`` argument (bits). Every routine that
produces a rounded result computes with guard bits and rounds once at the end.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import mpmath
from mpmath import mpf

__all__ = [
    "DEFAULT_PRECISION",
    "GUARD_BITS",
    "MIN_PRECISION",
    "ConstantEstimate",
    "ExtrapolationConfig",
    "InvalidArgument",
    "ResourceLimit",
    "check_precision",
    "const_pi",
    "default_precision",
    "estimate_leading_power",
    "matched_digits",
    "richardson_extrapolate",
    "round_to",
    "to_decimal",
    "zeta3_reference",
]

MIN_PRECISION = 64
DEFAULT_PRECISION = 256
GUARD_BITS = 32


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class ResourceLimit(RuntimeError):
    """A configured cap (terms, N) was exceeded.

    ``partial`` carries whatever was computed before the cap was hit.
    """

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


def default_precision() -> int:
    """Precision from ``HYPERLIM_PRECISION_BITS`` or the built-in default."""
    raw = os.environ.get("HYPERLIM_PRECISION_BITS")
    if not raw:
        return DEFAULT_PRECISION
    try:
        prec = int(raw)
    except ValueError:
        raise InvalidArgument(f"HYPERLIM_PRECISION_BITS={raw!r} is not an integer")
    return check_precision(prec)


def check_precision(prec: int) -> int:
    if isinstance(prec, bool) or not isinstance(prec, int):
        raise InvalidArgument(f"precision must be an integer number of bits, got {prec!r}")
    if prec < MIN_PRECISION:
        raise InvalidArgument(f"precision {prec} below minimum of {MIN_PRECISION} bits")
    return prec


def round_to(x, prec: int) -> mpf:
    """Round ``x`` to ``prec`` bits (round-to-nearest)."""
    with mpmath.workprec(prec):
        return +mpf(x)


def const_pi(prec: int = DEFAULT_PRECISION) -> mpf:
    """pi correctly rounded to ``prec`` bits."""
    check_precision(prec)
    with mpmath.workprec(prec):
        return +mpmath.pi


def zeta3_reference(prec: int = DEFAULT_PRECISION) -> mpf:
    """Apery's constant from the central-binomial series.

    zeta(3) = 5/2 * sum_{n>=1} (-1)^(n+1) / (n^3 binom(2n, n)).

    Terms shrink by roughly 4x per step and alternate in sign, so the
    truncation error is below the first omitted term.
    """
    check_precision(prec)
    wp = prec + GUARD_BITS
    eps = mpf(2) ** (-wp - 4)
    with mpmath.workprec(wp):
        total = mpf(0)
        binom = 1
        n = 1
        while True:
            binom = binom * 2 * (2 * n - 1) // n
            term = mpf(1) / (n**3 * binom)
            if term < eps:
                break
            total = total + term if n % 2 else total - term
            n += 1
        value = total * 5 / 2
    return round_to(value, prec)


@dataclass(frozen=True)
class ExtrapolationConfig:
    """Richardson schedule: ``samples`` values on a geometric parameter grid.

    The assumed error model is ``sum_k c_k h^(leading_power + (k-1)*power_step)``
    with ``h`` the step (or ``1/parameter`` for parameters growing to infinity).
    ``power_step`` defaults to ``leading_power``, i.e. powers p, 2p, 3p, ...
    """

    depth: int = 6
    schedule_ratio: int = 2
    leading_power: Fraction = Fraction(1)
    samples: int | None = None
    power_step: Fraction | None = None

    def __post_init__(self):
        if not isinstance(self.depth, int) or self.depth < 1:
            raise InvalidArgument(f"depth must be a positive integer, got {self.depth!r}")
        if not isinstance(self.schedule_ratio, int) or self.schedule_ratio < 2:
            raise InvalidArgument(f"schedule_ratio must be an integer >= 2, got {self.schedule_ratio!r}")
        lp = Fraction(self.leading_power)
        if lp <= 0:
            raise InvalidArgument(f"leading_power must be positive, got {self.leading_power!r}")
        object.__setattr__(self, "leading_power", lp)
        step = lp if self.power_step is None else Fraction(self.power_step)
        if step <= 0:
            raise InvalidArgument(f"power_step must be positive, got {self.power_step!r}")
        object.__setattr__(self, "power_step", step)
        samples = self.depth + 1 if self.samples is None else self.samples
        if not isinstance(samples, int) or samples < self.depth + 1:
            raise InvalidArgument(f"samples ({samples!r}) must be >= depth + 1 ({self.depth + 1})")
        object.__setattr__(self, "samples", samples)

    def exponents(self) -> list[Fraction]:
        return [self.leading_power + k * self.power_step for k in range(self.depth)]

    def as_dict(self) -> dict:
        return {
            "depth": self.depth,
            "schedule_ratio": self.schedule_ratio,
            "leading_power": str(self.leading_power),
            "power_step": str(self.power_step),
            "samples": self.samples,
        }


@dataclass(frozen=True)
class ConstantEstimate:
    """Deepest Richardson tableau entry plus a heuristic error estimate."""

    value: mpf
    error_estimate: mpf
    config: ExtrapolationConfig
    label: str = ""
    metadata: dict = field(default_factory=dict, compare=False)


def _to_mpf(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def _steps(params: Sequence[mpf]) -> list[mpf]:
    """Map a monotone schedule onto steps h decreasing toward zero."""
    if len(params) < 2:
        return list(params)
    increasing = params[1] > params[0]
    for a, b in zip(params, params[1:]):
        if (b > a) != increasing or a == b:
            raise InvalidArgument("sample parameters must be strictly monotone")
    if increasing:
        if params[0] <= 0:
            raise InvalidArgument("increasing parameters must be positive")
        return [1 / p for p in params]
    if params[-1] <= 0:
        raise InvalidArgument("decreasing parameters must stay positive")
    return list(params)


def richardson_extrapolate(
    samples: Iterable[tuple[Any, Any]],
    config: ExtrapolationConfig,
    prec: int = DEFAULT_PRECISION,
    label: str = "",
) -> ConstantEstimate:
    """Extrapolate ``(parameter, value)`` pairs to the limit.

    Parameters either shrink toward 0 (steps) or grow toward infinity; in the
    latter case the step is ``1/parameter``. Consecutive steps must shrink by
    exactly ``config.schedule_ratio``.

    The error estimate is the larger of the last column-to-column difference
    in the bottom row and, when there are spare samples, the difference
    between the two deepest entries of the last column. It is floored at
    2^(8 - prec) times the largest sample magnitude.
    """
    check_precision(prec)
    samples = list(samples)
    depth = config.depth
    if len(samples) < depth + 1:
        raise InvalidArgument(f"need at least depth + 1 = {depth + 1} samples, got {len(samples)}")
    wp = prec + GUARD_BITS
    with mpmath.workprec(wp):
        pairs = [(_to_mpf(p), _to_mpf(v)) for p, v in samples]
        steps = _steps([p for p, _ in pairs])
        ratio = mpf(config.schedule_ratio)
        for a, b in zip(steps, steps[1:]):
            if abs(a / b - ratio) > ratio * mpf(2) ** (-40):
                raise InvalidArgument(
                    f"parameter schedule is not geometric with ratio {config.schedule_ratio}"
                )
        factors = [mpmath.power(ratio, mpf(g.numerator) / g.denominator) for g in config.exponents()]
        columns = [[v for _, v in pairs]]
        for j in range(1, depth + 1):
            f = factors[j - 1]
            prev = columns[-1]
            col = [None] * len(pairs)
            for i in range(j, len(pairs)):
                col[i] = prev[i] + (prev[i] - prev[i - 1]) / (f - 1)
            columns.append(col)
        last = len(pairs) - 1
        value = columns[depth][last]
        err = abs(value - columns[depth - 1][last])
        if last - 1 >= depth:
            err = max(err, abs(value - columns[depth][last - 1]))
        # never claim more than the working precision can carry
        scale = max(abs(v) for _, v in pairs)
        err = max(err, scale * mpf(2) ** (-prec + 8))
    return ConstantEstimate(
        value=round_to(value, prec),
        error_estimate=round_to(err, prec),
        config=config,
        label=label,
        metadata={"parameters": [p for p, _ in pairs], "diagonal": [columns[j][last] for j in range(depth + 1)]},
    )


def estimate_leading_power(params: Sequence[Any], values: Sequence[Any]) -> list[float]:
    """Empirical convergence order from successive differences.

    For f(h) = L + c h^p + ..., (f_i - f_{i-1}) / (f_{i+1} - f_i) -> r^p where r
    is the step ratio. Returns one estimate of p per interior sample.
    """
    out = []
    with mpmath.workprec(8 * DEFAULT_PRECISION):
        steps = _steps([_to_mpf(p) for p in params])
        vals = [_to_mpf(v) for v in values]
        for i in range(1, len(vals) - 1):
            d0 = vals[i] - vals[i - 1]
            d1 = vals[i + 1] - vals[i]
            if d0 == 0 or d1 == 0:
                out.append(math.nan)
                continue
            r = steps[i - 1] / steps[i]
            out.append(float(mpmath.log(abs(d0 / d1)) / mpmath.log(r)))
    return out


def _exact_sub_bits(a: mpf, b: mpf) -> int:
    """Precision at which a - b is computed without rounding."""
    spans = [(e, e + m.bit_length()) for m, e in (x.man_exp for x in (a, b)) if m]
    if not spans:
        return MIN_PRECISION
    lo = min(e for e, _ in spans)
    hi = max(t for _, t in spans)
    return max(MIN_PRECISION, hi - lo + 2)


def matched_digits(computed, target) -> int:
    """floor(-log10 |computed - target|), clamped at 0; exact match -> 10**6."""
    with mpmath.workprec(8 * DEFAULT_PRECISION):
        a, b = _to_mpf(computed), _to_mpf(target)
    with mpmath.workprec(_exact_sub_bits(a, b)):
        diff = abs(a - b)
        if diff == 0:
            return 10**6
        d = -mpmath.log10(diff)
        return max(0, int(mpmath.floor(d)))


def to_decimal(x, decimals: int) -> str:
    """Fixed-point decimal text with ``decimals`` digits after the point."""
    if not isinstance(x, mpf):
        with mpmath.workprec(8 * DEFAULT_PRECISION):
            x = _to_mpf(x)
    with mpmath.workdps(decimals + 20):
        if x == 0:
            return "0." + "0" * decimals
        sig = max(1, int(mpmath.floor(mpmath.log10(abs(x)))) + 1 + decimals)
        text = mpmath.nstr(x, sig, strip_zeros=False, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
    if "." not in text:
        text += "."
    whole, frac = text.split(".")
    frac = (frac + "0" * decimals)[:decimals]
    return f"{whole}.{frac}"
