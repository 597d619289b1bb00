"""Generalized hyperfactorials and the constants A and B.

H_p(N) = prod_{k<=N} k^(k^p). Subtracting the known growth terms from
ln H_p(N) leaves a sequence converging to ln A (p = 1) or ln B (p = 2):

    p = 1:  ln H(N)   - (N^2/2 + N/2 + 1/12) ln N + N^2/4
    p = 2:  ln H_2(N) - (N^3/3 + N^2/2 + N/6) ln N + N^3/9 - N/12

Euler-Maclaurin on k^p ln k gives the shape of what is left: even powers
1/N^2, 1/N^4, ... for p = 1 and odd powers 1/N, 1/N^3, ... for p = 2.
``estimate_leading_power`` confirms both on the sampled schedule.
"""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

import mpmath
from mpmath import mpf

from .factored import FactoredRational, _sieve_for
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
    "A_CONFIG",
    "B_CONFIG",
    "DEFAULT_N0",
    "EXACT_N_CAP",
    "bendersky_B",
    "glaisher_A",
    "hyperfactorial_exact",
    "ln_hyperfactorial",
    "ln_hyperfactorial_many",
    "normalized_remainder",
    "normalized_remainders",
]

DEFAULT_N0 = 64
EXACT_N_CAP = 10**4

A_CONFIG = ExtrapolationConfig(depth=8, schedule_ratio=2, leading_power=Fraction(2), power_step=Fraction(2))
B_CONFIG = ExtrapolationConfig(depth=8, schedule_ratio=2, leading_power=Fraction(1), power_step=Fraction(2))


def _check_p(p) -> int:
    if p not in (1, 2) or isinstance(p, bool):
        raise InvalidArgument(f"only p in {{1, 2}} is supported, got {p!r}")
    return p


def _check_n(N, minimum: int = 1) -> int:
    if isinstance(N, bool) or not isinstance(N, int) or N < minimum:
        raise InvalidArgument(f"N must be an integer >= {minimum}, got {N!r}")
    return N


def ln_hyperfactorial_many(p: int, Ns, prec: int = DEFAULT_PRECISION) -> dict[int, mpf]:
    """ln H_p(N) for several N in one ascending pass."""
    _check_p(p)
    check_precision(prec)
    targets = sorted({_check_n(N) for N in Ns})
    top = targets[-1]
    wp = prec + GUARD_BITS + top.bit_length()
    out = {}
    want = iter(targets)
    nxt = next(want)
    with mpmath.workprec(wp):
        total = mpf(0)
        for k in range(1, top + 1):
            if k > 1:
                total += k**p * mpmath.log(k)
            if k == nxt:
                out[k] = round_to(total, prec)
                nxt = next(want, None)
    return out


def ln_hyperfactorial(p: int, N: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """sum_{k=1}^{N} k^p ln k."""
    return ln_hyperfactorial_many(p, [N], prec)[N]


def _main_terms(p: int, N: int) -> mpf:
    n = mpf(N)
    lnN = mpmath.log(n)
    if p == 1:
        return (n * n / 2 + n / 2 + mpf(1) / 12) * lnN - n * n / 4
    return (n**3 / 3 + n * n / 2 + n / 6) * lnN - n**3 / 9 + n / 12


def normalized_remainders(p: int, Ns, prec: int = DEFAULT_PRECISION) -> dict[int, mpf]:
    Ns = [_check_n(N, 2) for N in Ns]
    wp = prec + GUARD_BITS + 3 * max(Ns).bit_length()
    raw = ln_hyperfactorial_many(p, Ns, wp)
    out = {}
    with mpmath.workprec(wp):
        for N in Ns:
            out[N] = round_to(raw[N] - _main_terms(p, N), prec)
    return out


def normalized_remainder(p: int, N: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """ln H_p(N) minus its growth terms; tends to ln A (p=1) or ln B (p=2)."""
    _check_p(p)
    check_precision(prec)
    return normalized_remainders(p, [N], prec)[N]


def _extract(p: int, config: ExtrapolationConfig, prec: int, N0: int, label: str) -> ConstantEstimate:
    check_precision(prec)
    _check_n(N0, 2)
    Ns = [N0 * config.schedule_ratio**j for j in range(config.samples)]
    vals = normalized_remainders(p, Ns, prec + 16)
    log_est = richardson_extrapolate([(N, vals[N]) for N in Ns], config, prec=prec, label=f"ln {label}")
    with mpmath.workprec(prec + GUARD_BITS):
        value = mpmath.exp(log_est.value)
        err = value * log_est.error_estimate
    return ConstantEstimate(
        value=round_to(value, prec),
        error_estimate=round_to(err, prec),
        config=config,
        label=label,
        metadata={
            "log_value": log_est.value,
            "log_error_estimate": log_est.error_estimate,
            "N_schedule": Ns,
            "sample_values": [vals[N] for N in Ns],
            "diagonal": log_est.metadata["diagonal"],
        },
    )


def glaisher_A(config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, N0: int = DEFAULT_N0) -> ConstantEstimate:
    """Glaisher-Kinkelin constant from the hyperfactorial limit.

    ``value`` is A; ``metadata['log_value']`` holds ln A with its own error
    estimate.
    """
    return _extract(1, config or A_CONFIG, prec, N0, "A")


def bendersky_B(config: ExtrapolationConfig | None = None, prec: int = DEFAULT_PRECISION, N0: int = DEFAULT_N0) -> ConstantEstimate:
    """Bendersky-Adamchik constant from the H_2 limit (value B, metadata ln B)."""
    return _extract(2, config or B_CONFIG, prec, N0, "B")


def config_with_depth(base: ExtrapolationConfig, depth: int) -> ExtrapolationConfig:
    return replace(base, depth=depth, samples=depth + 1)


def hyperfactorial_exact(p: int, N: int) -> FactoredRational:
    """prod_{k<=N} k^(k^p) as a prime-exponent map."""
    _check_p(p)
    _check_n(N)
    if N > EXACT_N_CAP:
        raise ResourceLimit(f"hyperfactorial_exact capped at N = {EXACT_N_CAP}, got {N}")
    spf = _sieve_for(N)
    exps: dict[int, int] = {}
    for k in range(2, N + 1):
        w = k**p
        n = k
        while n > 1:
            q = spf[n]
            n //= q
            exps[q] = exps.get(q, 0) + w
    return FactoredRational._trusted(exps)
