"""Compare the numba and numpy brute-force kernels.

Usage: python3 benchmarks/bench_kernels.py [--terms N] [--repeat R]

Both kernel sets are called directly, so the HYPERLIM_DISABLE_NUMBA flag is
irrelevant here. The first numba call (compilation) is timed separately.
"""

import argparse
import time

from hyperlim.kernels import NUMBA_AVAILABLE, numba_kernels, numpy_kernels


def cases(n):
    return {
        "zeta3": (n,),
        "e_series": (3, 1, 1e-4, n),
        "lemma1": (3, 0.5, n),
        "half_tail": (10, n),
    }


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--terms", type=int, default=4_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not NUMBA_AVAILABLE:
        print("numba not installed; only the numpy kernels can run")

    print(f"{'kernel':<10} {'numpy s':>9} {'numba s':>9} {'jit s':>7} {'speedup':>8}  rel diff")
    for name, call_args in cases(args.terms).items():
        t_np, v_np = best_of(numpy_kernels[name], call_args, args.repeat)
        if not NUMBA_AVAILABLE:
            print(f"{name:<10} {t_np:9.3f}")
            continue
        t0 = time.perf_counter()
        numba_kernels[name](*call_args)
        t_jit = time.perf_counter() - t0
        t_nb, v_nb = best_of(numba_kernels[name], call_args, args.repeat)
        rel = abs(v_nb - v_np) / abs(v_np)
        print(f"{name:<10} {t_np:9.3f} {t_nb:9.3f} {t_jit:7.2f} {t_np / t_nb:7.1f}x  {rel:.1e}")


if __name__ == "__main__":
    main()
