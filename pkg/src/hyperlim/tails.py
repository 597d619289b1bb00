"""Euler-Maclaurin tails for sums of logarithm / reciprocal combinations.

A ``Kernel`` is a finite combination of the basis functions

    ('inv', c, p):  v^(-p)            p >= 1
    ('log', c, e):  v^e ln v          e in 0..2
    ('mono', c, e): v^e               e >= 0

with v = 2k + base + c, differentiated and integrated in k symbolically with
exact coefficients. For a completely monotone summand (or the negative of
one) the Euler-Maclaurin remainder after m correction terms is bounded by
the first omitted term, which is what ``em_tail`` reports as its bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import mpmath
from mpmath import mpf

from .numerics import InvalidArgument, ResourceLimit

__all__ = ["Kernel", "TailResult", "em_tail", "sum_with_tail"]


def _num(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def _is_zero(x, scale) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return abs(x) <= abs(scale) * mpf(2) ** (-mpmath.mp.prec + 16)


class Kernel:
    """Linear combination of basis functions of v = 2k + base + shift."""

    def __init__(self, terms: dict, base=0):
        self.terms = {key: c for key, c in terms.items() if c != 0}
        self.base = base

    def _new(self, terms: dict) -> "Kernel":
        return Kernel(terms, self.base)

    @staticmethod
    def _add(out: dict, key, coef):
        out[key] = out.get(key, 0) + coef

    def derivative(self) -> "Kernel":
        """d/dk (each d/dv picks up a factor 2)."""
        out: dict = {}
        for (kind, c, p), a in self.terms.items():
            if kind == "inv":
                self._add(out, ("inv", c, p + 1), -2 * p * a)
            elif kind == "mono":
                if p:
                    self._add(out, ("mono", c, p - 1), 2 * p * a)
            elif p == 0:
                self._add(out, ("inv", c, 1), 2 * a)
            else:
                self._add(out, ("log", c, p - 1), 2 * p * a)
                self._add(out, ("mono", c, p - 1), 2 * a)
        return self._new(out)

    def antiderivative(self) -> "Kernel":
        """An antiderivative in k (each 1/dv integration picks up 1/2)."""
        out: dict = {}
        half = Fraction(1, 2)
        for (kind, c, p), a in self.terms.items():
            if kind == "inv":
                if p == 1:
                    self._add(out, ("log", c, 0), half * a)
                else:
                    self._add(out, ("inv", c, p - 1), -a * half / (p - 1))
            elif kind == "mono":
                self._add(out, ("mono", c, p + 1), a * half / (p + 1))
            elif p == 0:
                self._add(out, ("log", c, 1), half * a)
                self._add(out, ("mono", c, 1), -half * a)
            elif p == 1:
                self._add(out, ("log", c, 2), a * Fraction(1, 4))
                self._add(out, ("mono", c, 2), -a * Fraction(1, 8))
            else:
                raise InvalidArgument("antiderivative of v^2 ln v is not needed here")
        return self._new(out)

    def limit_at_infinity(self):
        """Constant term of the expansion in U = 2k + base as U -> infinity.

        Raises if the growing parts (U^a, U^a ln U) fail to cancel, i.e. the
        combination has no finite limit.
        """
        divergent: dict = {}
        const = 0
        scale = 0
        for (kind, c, p), a in self.terms.items():
            scale = max(scale, abs(_num(a)) * (1 + abs(_num(c))) ** max(p, 0))
            if kind == "inv":
                continue
            if kind == "mono":
                for j in range(p + 1):
                    coef = a * comb(p, j) * c ** (p - j)
                    if j == 0:
                        const += coef
                    else:
                        self._add(divergent, ("U", j), coef)
                continue
            for j in range(p + 1):
                self._add(divergent, ("lnU", j), a * comb(p, j) * c ** (p - j))
            for j0 in range(p):
                # pure U^j0 from (U + c)^p * sum_m (-1)^(m+1) c^m / (m U^m)
                coef = 0
                for j in range(j0 + 1, p + 1):
                    m = j - j0
                    coef += comb(p, j) * c ** (p - j) * (-1) ** (m + 1) * Fraction(1, m) * c**m
                if j0 == 0:
                    const += a * coef
                else:
                    self._add(divergent, ("U", j0), a * coef)
        for key, coef in divergent.items():
            if not _is_zero(coef, scale):
                raise InvalidArgument(f"kernel antiderivative diverges ({key} coefficient {coef})")
        return const

    def evaluate(self, k) -> tuple[mpf, mpf]:
        """(value, sum of |contributions|) at integer or real k."""
        total = mpf(0)
        mag = mpf(0)
        base = _num(self.base)
        logs: dict = {}
        for (kind, c, p), a in self.terms.items():
            v = 2 * mpf(k) + base + _num(c)
            if kind == "inv":
                b = v ** (-p)
            elif kind == "mono":
                b = v**p
            else:
                if c not in logs:
                    if not v > 0:
                        raise InvalidArgument("logarithm argument must be positive")
                    logs[c] = mpmath.log(v)
                b = v**p * logs[c]
            t = _num(a) * b
            total += t
            mag += abs(t)
        return total, mag


@dataclass(frozen=True)
class TailResult:
    value: mpf
    bound: mpf
    corrections: int


def _bernoulli_over_factorial(i: int) -> Fraction:
    p, q = mpmath.bernfrac(2 * i)
    return Fraction(int(p), int(q) * factorial(2 * i))


def em_tail(kernel: Kernel, K: int, target, max_corrections: int = 80) -> TailResult | None:
    """sum_{k >= K} f(k) at the current mpmath precision.

    Returns None when the correction terms start growing before reaching
    ``target`` (K too small for the requested accuracy).
    """
    eps = mpf(2) ** (-mpmath.mp.prec + 2)
    F = kernel.antiderivative()
    lim = _num(F.limit_at_infinity())
    F_K, mag_F = F.evaluate(K)
    f_K, mag_f = kernel.evaluate(K)
    value = lim - F_K + f_K / 2
    rounding = (mag_F + abs(lim) + mag_f) * eps
    d = kernel.derivative()
    prev = None
    for i in range(1, max_corrections + 2):
        coef = _num(_bernoulli_over_factorial(i))
        dval, dmag = d.evaluate(K)
        term = coef * dval
        if abs(term) <= target:
            bound = abs(term) + rounding
            return TailResult(value, bound, i - 1)
        if prev is not None and abs(term) >= abs(prev):
            return None
        value -= term
        rounding += abs(coef) * dmag * eps
        prev = term
        d = d.derivative().derivative()
    return None


def sum_with_tail(kernel: Kernel, start: int, target, partial=None, v_floor: int = 64, max_explicit: int = 1 << 16):
    """sum_{k >= start} f(k) = explicit terms up to K-1 plus an EM tail from K.

    ``partial(start, K)`` may supply the explicit part (e.g. exactly); by
    default the kernel is evaluated term by term. K is the first index with
    2K + base >= v_floor, doubled until the tail converges to ``target``.
    Returns (value, bound, explicit_terms).
    """
    base = _num(kernel.base)
    shifts = [_num(c) for (_, c, _) in kernel.terms]
    lo = min(shifts) if shifts else mpf(0)
    floor = v_floor
    while True:
        need = (floor - base - lo) / 2
        K = max(start, int(mpmath.ceil(need)))
        if K - start > max_explicit:
            raise ResourceLimit(f"tail needs more than {max_explicit} explicit terms")
        tail = em_tail(kernel, K, target)
        if tail is not None:
            break
        floor *= 2
    if partial is not None:
        head = partial(start, K)
        head_mag = abs(head)
    else:
        head = mpf(0)
        head_mag = mpf(0)
        for k in range(start, K):
            t, m = kernel.evaluate(k)
            head += t
            head_mag += m
    eps = mpf(2) ** (-mpmath.mp.prec + 2)
    return head + tail.value, tail.bound + head_mag * eps * max(1, K - start), K - start
