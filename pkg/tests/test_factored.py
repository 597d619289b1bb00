from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from hyperlim.factored import ExponentAccumulator, FactoredRational, factor_int
from hyperlim.numerics import InvalidArgument

positive_fractions = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6).filter(lambda q: q > 0)


def test_factor_int_small_and_large():
    assert factor_int(360) == {2: 3, 3: 2, 5: 1}
    big = (2**31 - 1) * (2**61 - 1)
    assert factor_int(big) == {2**31 - 1: 1, 2**61 - 1: 1}
    assert factor_int(1) == {}


def test_constructor_validates_primes():
    with pytest.raises(InvalidArgument):
        FactoredRational({4: 1})
    with pytest.raises(InvalidArgument):
        FactoredRational({3: Fraction(1, 2)})
    assert FactoredRational({3: 0}).is_one()


@settings(max_examples=100, deadline=None)
@given(a=positive_fractions, b=positive_fractions, k=st.integers(-4, 4))
def test_arithmetic_matches_fractions(a, b, k):
    fa, fb = FactoredRational.from_fraction(a), FactoredRational.from_fraction(b)
    assert (fa * fb).as_fraction() == a * b
    assert (fa / fb).as_fraction() == a / b
    assert (fa**k).as_fraction() == a**k
    assert (fa == fb) == (a == b)


def test_huge_exponents_never_materialize():
    x = FactoredRational({2: 10**30, 3: -(10**30)})
    with mpmath.workprec(200):
        expected = 10**30 * (mpmath.log(2) - mpmath.log(3))
        assert abs(x.log(128) - expected) < abs(expected) * mpmath.mpf(2) ** -120


def test_accumulator():
    acc = ExponentAccumulator()
    acc.mul(12, 2)
    acc.mul(18, -1)
    assert acc.result().as_fraction() == Fraction(144, 18)
    with pytest.raises(InvalidArgument):
        acc.mul(0)


def test_from_fraction_rejects_nonpositive():
    with pytest.raises(InvalidArgument):
        FactoredRational.from_fraction(0)
