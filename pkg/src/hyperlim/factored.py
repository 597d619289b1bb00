"""Exact positive rationals stored as prime -> exponent maps.

Products with exponents in the thousands (or millions) never materialize the
underlying integers; multiplication is exponent addition.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping

import gmpy2
import mpmath
from mpmath import mpf

from .numerics import DEFAULT_PRECISION, GUARD_BITS, InvalidArgument, check_precision, round_to

__all__ = ["FactoredRational", "factor_int", "spf_sieve"]

_SIEVE_LIMIT = 1 << 20


@lru_cache(maxsize=8)
def spf_sieve(limit: int) -> list[int]:
    """Smallest prime factor of every integer up to ``limit``."""
    spf = list(range(limit + 1))
    i = 2
    while i * i <= limit:
        if spf[i] == i:
            for j in range(i * i, limit + 1, i):
                if spf[j] == j:
                    spf[j] = i
        i += 1
    return spf


def _sieve_for(n: int) -> list[int]:
    size = 1024
    while size < n:
        size *= 4
    return spf_sieve(size)


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer."""
    if not isinstance(n, int) or n < 1:
        raise InvalidArgument(f"can only factor positive integers, got {n!r}")
    if n <= _SIEVE_LIMIT:
        spf = _sieve_for(n)
        out: dict[int, int] = {}
        while n > 1:
            p = spf[n]
            n //= p
            out[p] = out.get(p, 0) + 1
        return out
    from sympy import factorint

    return {int(p): int(e) for p, e in factorint(n).items()}


class FactoredRational:
    """Positive rational as {prime: nonzero int exponent}."""

    __slots__ = ("_exp",)

    def __init__(self, exponents: Mapping[int, int] | None = None):
        exp = {}
        for p, e in (exponents or {}).items():
            if not isinstance(e, int):
                raise InvalidArgument(f"exponent of {p} must be an integer, got {e!r}")
            if e == 0:
                continue
            if not isinstance(p, int) or p < 2 or not gmpy2.is_prime(p):
                raise InvalidArgument(f"{p!r} is not a prime")
            exp[p] = e
        self._exp = exp

    @classmethod
    def _trusted(cls, exponents: dict[int, int]) -> "FactoredRational":
        obj = cls.__new__(cls)
        obj._exp = {p: e for p, e in exponents.items() if e}
        return obj

    @classmethod
    def one(cls) -> "FactoredRational":
        return cls._trusted({})

    @classmethod
    def from_int(cls, n: int) -> "FactoredRational":
        return cls._trusted(factor_int(n))

    @classmethod
    def from_fraction(cls, q) -> "FactoredRational":
        q = Fraction(q)
        if q <= 0:
            raise InvalidArgument(f"only positive rationals are representable, got {q}")
        num = factor_int(q.numerator)
        for p, e in factor_int(q.denominator).items():
            num[p] = num.get(p, 0) - e
        return cls._trusted(num)

    @property
    def exponents(self) -> dict[int, int]:
        return dict(self._exp)

    def items(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self._exp.items()))

    def is_one(self) -> bool:
        return not self._exp

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        out = dict(self._exp)
        for p, e in other._exp.items():
            out[p] = out.get(p, 0) + e
        return FactoredRational._trusted(out)

    def __truediv__(self, other: "FactoredRational") -> "FactoredRational":
        out = dict(self._exp)
        for p, e in other._exp.items():
            out[p] = out.get(p, 0) - e
        return FactoredRational._trusted(out)

    def __pow__(self, k: int) -> "FactoredRational":
        if not isinstance(k, int):
            raise InvalidArgument("FactoredRational powers must be integers")
        return FactoredRational._trusted({p: e * k for p, e in self._exp.items()})

    def __eq__(self, other):
        if not isinstance(other, FactoredRational):
            return NotImplemented
        return self._exp == other._exp

    def __hash__(self):
        return hash(frozenset(self._exp.items()))

    def __repr__(self):
        return f"FactoredRational({dict(sorted(self._exp.items()))})"

    def as_fraction(self) -> Fraction:
        """Materialize the value; only sensible for modest exponents."""
        num = 1
        den = 1
        for p, e in self._exp.items():
            if e > 0:
                num *= p**e
            else:
                den *= p ** (-e)
        return Fraction(num, den)

    def log(self, prec: int = DEFAULT_PRECISION) -> mpf:
        """Natural log as sum of exponent * ln(prime)."""
        check_precision(prec)
        biggest = max((abs(e) for e in self._exp.values()), default=1)
        wp = prec + GUARD_BITS + biggest.bit_length() + len(self._exp).bit_length()
        with mpmath.workprec(wp):
            total = mpf(0)
            for p, e in sorted(self._exp.items()):
                total += e * mpmath.log(p)
        return round_to(total, prec)


class ExponentAccumulator:
    """Mutable builder: multiply in integer bases raised to integer powers."""

    def __init__(self):
        self._exp: dict[int, int] = {}

    def mul(self, base: int, power: int = 1) -> None:
        if power == 0 or base == 1:
            return
        if base < 1:
            raise InvalidArgument(f"bases must be positive integers, got {base}")
        for p, e in factor_int(base).items():
            self._exp[p] = self._exp.get(p, 0) + e * power

    def mul_factored(self, value: FactoredRational, power: int = 1) -> None:
        for p, e in value._exp.items():
            self._exp[p] = self._exp.get(p, 0) + e * power

    def result(self) -> FactoredRational:
        return FactoredRational._trusted(self._exp)
