import mpmath
import pytest
from mpmath import mpf

from hyperlim.constants import (
    A_CONFIG,
    B_CONFIG,
    bendersky_B,
    config_with_depth,
    glaisher_A,
    hyperfactorial_exact,
    ln_hyperfactorial,
    normalized_remainder,
    normalized_remainders,
)
from hyperlim.numerics import ExtrapolationConfig, InvalidArgument, ResourceLimit, estimate_leading_power

HP = 320


def test_ln_hyperfactorial_examples():
    assert ln_hyperfactorial(1, 1) == 0
    with mpmath.workprec(HP):
        assert abs(ln_hyperfactorial(1, 3) - (2 * mpmath.log(2) + 3 * mpmath.log(3))) < mpf(2) ** -250
        assert abs(ln_hyperfactorial(2, 2) - 4 * mpmath.log(2)) < mpf(2) ** -250
    assert abs(ln_hyperfactorial(1, 3) - mpf("4.6821312")) < mpf(10) ** -7
    with pytest.raises(InvalidArgument):
        ln_hyperfactorial(3, 4)


def test_ln_hyperfactorial_against_mpmath_hyperfac():
    for N in (5, 50, 400):
        with mpmath.workprec(HP):
            ref = mpmath.log(mpmath.hyperfac(N))
            assert abs(ln_hyperfactorial(1, N) - ref) <= abs(ref) * mpf(2) ** -250


def test_exact_examples():
    assert hyperfactorial_exact(1, 2).exponents == {2: 2}
    assert hyperfactorial_exact(1, 4).exponents == {2: 10, 3: 3}
    assert hyperfactorial_exact(2, 3).exponents == {2: 4, 3: 9}
    with pytest.raises(ResourceLimit):
        hyperfactorial_exact(1, 10**4 + 1)


@pytest.mark.parametrize("p", [1, 2])
def test_exact_float_agreement_8_ulp(p):
    for N in (2, 17, 100, 500):
        exact = hyperfactorial_exact(p, N).log(256)
        approx = ln_hyperfactorial(p, N, 256)
        with mpmath.workprec(HP):
            ulp = mpf(2) ** (int(mpmath.floor(mpmath.log(abs(exact), 2))) - 255)
            assert abs(exact - approx) <= 8 * ulp


def test_normalized_remainder_example():
    with mpmath.workprec(HP):
        want = 1 - mpf(13) / 12 * mpmath.log(2)
        assert abs(normalized_remainder(1, 2) - want) < mpf(2) ** -250


def test_measured_leading_powers():
    Ns = [64 * 2**j for j in range(6)]
    for p, expected in ((1, 2), (2, 1)):
        vals = normalized_remainders(p, Ns, 256)
        orders = estimate_leading_power(Ns, [vals[N] for N in Ns])
        assert all(abs(o - expected) < 0.05 for o in orders), orders


def test_glaisher_default():
    A = glaisher_A()
    assert A.error_estimate <= mpf(10) ** -15
    with mpmath.workprec(HP):
        assert abs(A.value - mpmath.glaisher) <= max(A.error_estimate, mpf(10) ** -40)
    assert abs(A.metadata["log_value"] - mpf("0.2487544770")) < mpf(10) ** -10
    assert A.label == "A"


def test_bendersky_default():
    B = bendersky_B()
    assert abs(B.value - mpf("1.0309167")) < mpf(10) ** -7
    assert abs(B.metadata["log_value"] - mpf("0.0304484571")) < mpf(10) ** -10


def test_shallow_configs_agree():
    A = glaisher_A()
    A1 = glaisher_A(config_with_depth(A_CONFIG, 1), N0=64)
    assert abs(A1.value - A.value) < mpf(10) ** -4
    B = bendersky_B()
    B2 = bendersky_B(config_with_depth(B_CONFIG, 2), N0=4)
    assert abs(B2.value - B.value) < mpf(10) ** -3


def test_samples_one_is_invalid():
    with pytest.raises(InvalidArgument):
        glaisher_A(ExtrapolationConfig(depth=1, samples=1))


@pytest.mark.parametrize("fn,base", [(glaisher_A, A_CONFIG), (bendersky_B, B_CONFIG)])
def test_extrapolation_stability(fn, base):
    # depth d and d+1 differ by less than the depth-d error estimate
    ests = {d: fn(config_with_depth(base, d)) for d in range(2, 8)}
    for d in range(2, 7):
        with mpmath.workprec(HP):
            gap = abs(ests[d + 1].metadata["log_value"] - ests[d].metadata["log_value"])
        assert gap < ests[d].metadata["log_error_estimate"]
