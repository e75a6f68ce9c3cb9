"""Compare the compiled and numpy QSP kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per (kernel, degree, nodes) with the median time of each
backend and the speedup.  Both backends are checked to agree to 1e-12.
"""

import argparse
import timeit

import numpy as np

from tdhsim import _kernels_py as py_kernels
from tdhsim import kernels


def median_time(fn, repeat):
    return float(np.median(timeit.repeat(fn, number=1, repeat=repeat)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args(argv)
    if not kernels.compiled_available():
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
        return 1
    from tdhsim import _kernels as cy_kernels

    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'degree':>8}{'nodes':>8}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name in ("qsp_top_left", "qsp_top_left_grad"):
        for degree, nodes in ((10, 64), (40, 256), (160, 1024)):
            phases = rng.uniform(-np.pi, np.pi, size=degree + 1)
            xs = np.cos(np.linspace(0.01, np.pi - 0.01, nodes))
            f_py = getattr(py_kernels, name)
            f_cy = getattr(cy_kernels, name)
            a, b = f_py(phases, xs), f_cy(phases, xs)
            pairs = zip(a, b) if isinstance(a, tuple) else [(a, b)]
            assert all(np.max(np.abs(u - v)) <= 1e-12 for u, v in pairs)
            t_py = median_time(lambda: f_py(phases, xs), args.repeat)
            t_cy = median_time(lambda: f_cy(phases, xs), args.repeat)
            print(f"{name:<20}{degree:>8}{nodes:>8}{1e3 * t_py:>12.3f}{1e3 * t_cy:>12.3f}"
                  f"{t_py / t_cy:>10.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
