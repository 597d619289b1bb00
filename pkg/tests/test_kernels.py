import math
import os
import subprocess
import sys

import mpmath
import pytest

from hyperlim import kernels


CASES = [
    ("zeta3", (200_000,)),
    ("e_series", (2, 1, 0.01, 50_000)),
    ("lemma1", (2, 0.5, 100_000)),
    ("half_tail", (10, 100_000)),
]


@pytest.mark.skipif(not kernels.NUMBA_AVAILABLE, reason="numba not installed")
@pytest.mark.parametrize("name,args", CASES)
def test_numba_and_numpy_agree(name, args):
    a = kernels.numba_kernels[name](*args)
    b = kernels.numpy_kernels[name](*args)
    assert math.isclose(a, b, rel_tol=1e-14, abs_tol=1e-300)


def test_direct_sums_against_mpmath():
    assert math.isclose(kernels.direct_zeta3(1000), float(mpmath.fsum(mpmath.mpf(1) / k**3 for k in range(1, 1001))), rel_tol=1e-15)
    q = math.exp(-0.2)
    ref = math.fsum((1 - q**n) / (1 + q**n) * q**n / n for n in range(1, 400))
    assert math.isclose(kernels.direct_e_series(1, 1, 0.1, 399), ref, rel_tol=1e-13)


def test_env_flag_selects_numpy_path():
    env = dict(os.environ, HYPERLIM_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from hyperlim import kernels; print(kernels.USE_NUMBA)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "False"
