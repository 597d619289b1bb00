from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from hyperlim.numerics import InvalidArgument
from hyperlim.tails import Kernel, em_tail, sum_with_tail


def test_derivative_matches_numeric_diff():
    ker = Kernel({("inv", 1, 2): 3, ("log", 0, 1): Fraction(1, 2), ("mono", 2, 1): -1}, base=5)
    d = ker.derivative()
    with mpmath.workprec(200):
        k = mpf("3.25")
        num = mpmath.diff(lambda t: ker.evaluate(t)[0], k)
        assert abs(d.evaluate(k)[0] - num) < mpf(10) ** -40


def test_antiderivative_roundtrip():
    ker = Kernel({("inv", 0, 1): 1, ("inv", 3, 4): -2, ("log", 1, 0): 1, ("log", -1, 1): 1}, base=7)
    back = ker.antiderivative().derivative()
    with mpmath.workprec(200):
        for k in (1, 4, 20):
            assert abs(back.evaluate(k)[0] - ker.evaluate(k)[0]) < mpf(10) ** -50


def test_divergent_antiderivative_rejected():
    with pytest.raises(InvalidArgument):
        Kernel({("inv", 0, 1): 1}).antiderivative().limit_at_infinity()


def test_em_tail_against_trigamma():
    # sum_{k>=K} 1/(2k+1)^2 = psi'(K + 1/2) / 4
    ker = Kernel({("inv", 1, 2): 1})
    with mpmath.workprec(300):
        res = em_tail(ker, 40, mpf(10) ** -60)
        ref = mpmath.psi(1, 40 + mpf(1) / 2) / 4
        assert res is not None
        assert abs(res.value - ref) <= res.bound


def test_sum_with_tail_log_kernel_against_loggamma():
    # sum_{k>=1} [2 ln 2k - ln(2k-1) - ln(2k+1)] = ln(pi/2)
    ker = Kernel({("log", 0, 0): 2, ("log", -1, 0): -1, ("log", 1, 0): -1})
    with mpmath.workprec(300):
        value, bound, used = sum_with_tail(ker, 1, mpf(10) ** -50)
        assert abs(value - mpmath.log(mpmath.pi / 2)) <= bound
        assert bound < mpf(10) ** -45
