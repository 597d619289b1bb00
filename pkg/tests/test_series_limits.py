import math
import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from hyperlim.kernels import direct_e_series
from hyperlim.numerics import InvalidArgument, ResourceLimit, zeta3_reference
from hyperlim.series_limits import (
    EIndex,
    e_limit,
    e_partial,
    e_term,
    partial_sum,
    recursion_residual,
)


def hp(x, prec=300):
    with mpmath.workprec(prec):
        return mpf(x)


def test_eindex_validation():
    assert EIndex.from_index(2, 6) == EIndex(2, 3)
    assert EIndex(1, 2).index == 4
    for bad in ((4, 1), (-1, 1), (1, -1)):
        with pytest.raises(InvalidArgument):
            EIndex(*bad)
    with pytest.raises(InvalidArgument):
        EIndex.from_index(1, 3)


def test_e_term_examples():
    with mpmath.workprec(300):
        a = mpmath.log(2) / 2
    assert abs(e_term(EIndex(0, 1), 1, a) - mpf(1) / 4) < mpf(2) ** -250
    with mpmath.workprec(300):
        assert abs(e_term(EIndex(1, 0), 1, a) - mpf(1) / 3) < mpf(2) ** -250
    t = e_term(EIndex(3, 1), 2, Fraction(1, 10))
    assert 0 < t < mpf("0.5") * mpmath.exp(-0.4)
    with pytest.raises(InvalidArgument):
        e_term(EIndex(0, 1), 1, 0)


def test_e_partial_matches_finite_alpha_closed_form():
    # for M = 0 the sum telescopes to ln((1 - q^(s+1)) / (1 - q^s))
    sv = e_partial(EIndex(0, 1), Fraction(1, 20), mpf(10) ** -30)
    with mpmath.workprec(300):
        exact = mpmath.log(-mpmath.expm1(-mpf("0.2")) / -mpmath.expm1(-mpf("0.1")))
        assert abs(sv.value - exact) <= mpf(10) ** -30
        assert abs(sv.value - exact) <= sv.tail_bound


@pytest.mark.parametrize("s", [1, 2, 5])
@pytest.mark.parametrize("alpha", [Fraction(1, 100), Fraction(1, 3), 2])
def test_enclosure_invariant_m0(s, alpha):
    sv = e_partial(EIndex(0, s), alpha, mpf(10) ** -40)
    with mpmath.workprec(400):
        a = mpf(alpha.numerator) / alpha.denominator if isinstance(alpha, Fraction) else mpf(alpha)
        exact = mpmath.log(-mpmath.expm1(-(2 * s + 2) * a) / -mpmath.expm1(-2 * s * a))
        assert abs(sv.value - exact) <= sv.tail_bound


def test_e_partial_against_brute_force():
    sv = e_partial(EIndex(3, 1), Fraction(1, 5), mpf(10) ** -20)
    assert sv.tail_bound <= mpf(10) ** -20
    brute = direct_e_series(3, 1, 0.2, 10**6)
    assert math.isclose(float(sv.value), brute, rel_tol=1e-14)


def test_doubling_moves_less_than_tail_bound():
    rng = random.Random(7)
    for _ in range(15):
        idx = EIndex(rng.randint(0, 3), rng.randint(1, 4))
        alpha = Fraction(rng.randint(1, 200), 100)
        tol = mpf(10) ** -rng.randint(5, 40)
        sv = e_partial(idx, alpha, tol)
        doubled = partial_sum(idx, alpha, 2 * sv.terms_used)
        with mpmath.workprec(300):
            assert abs(doubled - sv.value) <= sv.tail_bound


def test_s_zero_rejected_for_sums():
    for M in range(4):
        with pytest.raises(InvalidArgument):
            e_partial(EIndex(M, 0), Fraction(1, 10), mpf(10) ** -10)


def test_unreachable_tolerance_and_cap():
    with pytest.raises(InvalidArgument):
        e_partial(EIndex(1, 1), Fraction(1, 10), mpf(2) ** -300, prec=256)
    with pytest.raises(ResourceLimit) as info:
        e_partial(EIndex(1, 1), Fraction(1, 1000), mpf(10) ** -30, max_terms=100)
    partial = info.value.partial
    assert partial.terms_used == 100 and partial.value > 0


@pytest.mark.parametrize(
    "M,s,alpha,n_max",
    [(1, 1, Fraction(1, 10), 100), (3, 0, Fraction(1, 100), 1000), (2, 5, 1, 10)],
)
def test_recursion_residual_examples(M, s, alpha, n_max):
    assert recursion_residual(M, s, alpha, n_max) <= mpf(2) ** -240


def test_recursion_residual_within_16_ulp_of_largest_term():
    alpha = Fraction(1, 10)
    for M in (1, 2, 3):
        for s in range(4):
            big = max(e_term(EIndex(M - 1, s), n, alpha) for n in range(1, 60))
            ulp = mpf(2) ** (int(mpmath.floor(mpmath.log(big, 2))) - 255)
            assert recursion_residual(M, s, alpha, 60) <= 16 * ulp


def test_e_limit_case_zero_is_ln2():
    est = e_limit(EIndex(0, 1))
    with mpmath.workprec(300):
        assert abs(est.value - mpmath.log(2)) <= est.error_estimate


@pytest.mark.parametrize("s", [1, 2, 3, 7, 10])
def test_e_limit_oracle_equivalence(s):
    est = e_limit(EIndex(0, s))
    with mpmath.workprec(300):
        assert abs(est.value - mpmath.log1p(mpf(1) / s)) <= 3 * est.error_estimate


def test_e_limit_wallis_and_zeta_examples():
    est = e_limit(EIndex.from_index(1, 2))
    with mpmath.workprec(300):
        assert abs(est.value - mpmath.log(mpmath.pi / 2)) < mpf(10) ** -8
    est = e_limit(EIndex.from_index(3, 2))
    z = zeta3_reference(300)
    with mpmath.workprec(300):
        assert abs(est.value - 7 * z / (4 * mpmath.pi**2)) < mpf(10) ** -8


def test_e_limit_monotone_decay_in_s():
    vals = [e_limit(EIndex(2, s)).value for s in (1, 2, 3)]
    assert vals[0] > vals[1] > vals[2] > 0
