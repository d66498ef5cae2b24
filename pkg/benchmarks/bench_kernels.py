"""Compare the compiled and the numpy kernels of ``apply_T``.

Usage::

    python3 benchmarks/bench_kernels.py [--nodes 512 1024] [--repeat 5] [--a 1 0.5]

Prints one line per configuration with the best-of-``repeat`` time of each
kernel, the speed-up and the largest nodewise difference of the outputs.
"""

import argparse
import math
import sys
import timeit

import numpy as np

from fdivmetric import _kernels
from fdivmetric.divergence_dynamics import N_GOLDEN, N_SCAN, prefactor


def profile(n, a, s_max=64.0):
    s = np.exp(np.linspace(0.0, math.log(s_max), n))
    v = 2.0 * (np.sqrt(s) - 1.0) ** 2 * (1.0 + 0.2 * np.log(s) ** 2) ** a
    v[0] = 0.0
    return v, math.log(s_max) / (n - 1)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--a", type=float, nargs="+", default=[1.0, 0.5])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    try:
        _, fast = _kernels.get_kernel("cython")
    except ImportError:
        print("compiled kernel not built; reinstall with Cython available", file=sys.stderr)
        return 1
    _, slow = _kernels.get_kernel("python")
    print(f"{'nodes':>6} {'a':>5} {'cython [ms]':>12} {'numpy [ms]':>11} {'speed-up':>9} {'max diff':>10}")
    for n in args.nodes:
        for a in args.a:
            v, h = profile(n, a)
            fac = prefactor(a)
            call = (v, h, fac, N_SCAN, N_GOLDEN, a)
            t_fast = min(timeit.repeat(lambda: fast(*call), number=1, repeat=args.repeat))
            t_slow = min(timeit.repeat(lambda: slow(*call), number=1, repeat=args.repeat))
            diff = float(np.max(np.abs(fast(*call) - slow(*call))))
            print(f"{n:>6} {a:>5.2f} {1e3 * t_fast:>12.2f} {1e3 * t_slow:>11.2f} {t_slow / t_fast:>9.1f} {diff:>10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
