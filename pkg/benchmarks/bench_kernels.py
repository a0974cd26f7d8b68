"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--terms 1000000] [--walks 100000] [--repeat 3]

Both backends are imported directly, so the selection switch is not
involved.  Each case also checks the two outputs agree.
"""

import argparse
import math
import time

import numpy as np

from dirichlet_lab import _fallback

try:
    from dirichlet_lab import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench_partial_sums(mod, n, repeat):
    k = np.arange(1, n + 1, dtype=np.float64)
    lam = np.log(k)
    coef = (1.0 / k).astype(np.complex128)
    idx = np.arange(1, n + 1, dtype=np.int64)
    return best_of(lambda: mod.partial_sums(lam, coef, 0.0, 1.0, idx), repeat)


def bench_wos(mod, walks, repeat):
    params = np.array([0.0, 0.0, 1.0, 0.0])
    # off-centre start: from the centre every walk ends in one jump
    return best_of(lambda: mod.wos_walks(0, params, 0.3, 0.2, 7, 0, walks, 2e-6, 10_000), repeat)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--terms", type=int, default=1_000_000)
    ap.add_argument("--walks", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")

    print(f"{'case':<28}{'backend':<10}{'seconds':>10}{'speedup':>10}")
    cases = [
        (f"partial_sums N={args.terms:.0e}", lambda m: bench_partial_sums(m, args.terms, args.repeat)),
        (f"wos_walks n={args.walks:.0e}", lambda m: bench_wos(m, args.walks, args.repeat)),
    ]
    for name, case in cases:
        t_py, out_py = case(_fallback)
        print(f"{name:<28}{'python':<10}{t_py:>10.3f}{'1.0x':>10}")
        if _kernels is None:
            continue
        t_c, out_c = case(_kernels)
        print(f"{name:<28}{'cython':<10}{t_c:>10.3f}{t_py / t_c:>9.1f}x")
        if isinstance(out_py, tuple):
            same = all(np.array_equal(np.asarray(a), np.asarray(b)) for a, b in zip(out_py, out_c))
            print(f"{'':<28}agree bit-exactly: {same}")
        else:
            err = float(np.max(np.abs(np.asarray(out_py) - np.asarray(out_c))))
            print(f"{'':<28}max |diff| = {err:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
