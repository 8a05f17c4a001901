"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Prints wall-clock times per kernel and the largest difference between the
two backends' results.
"""

import argparse
import time

import numpy as np

from nonnoether import _fallback, geom, kernels, models

try:
    from nonnoether import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    m = models.build_toda(3)
    rhs = kernels.TermTable(geom.components(m.X), m.dim)
    mon = kernels.TermTable([m.h], m.dim)
    z0 = np.array([0.3, -0.2, 0.1, 0.5, -0.4, 0.2])
    x = np.arange(1024) * (80.0 / 1024)
    u0 = models.kdv_soliton(x, 0.0, 0.5, 40.0)
    dx = 80.0 / 1024
    return [
        ("eval_table toda3 rhs x10000",
         lambda impl: [impl.eval_table(*rhs.args()[:5], rhs.nout, z0, 0.0) for _ in range(10000)][-1]),
        ("rk4 toda3 T=10 dt=1e-3",
         lambda impl: impl.rk4(rhs.args(), mon.args(), z0, 0.0, 1e-3, 10000)[0][-1]),
        ("pde_rk4 kdv N=1024 x2000 steps",
         lambda impl: impl.pde_rk4(u0, dx, 0.2 * dx ** 3, 2000, "kdv")),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback is timed")
    print("%-34s %12s %12s %9s %11s" % ("kernel", "numpy [s]", "cython [s]", "speedup", "max |diff|"))
    for name, fn in cases():
        tf, rf = best_of(lambda: fn(_fallback), args.repeat)
        if _ckernels is None:
            print("%-34s %12.4f %12s %9s %11s" % (name, tf, "-", "-", "-"))
            continue
        tc, rc = best_of(lambda: fn(_ckernels), args.repeat)
        diff = float(np.max(np.abs(np.asarray(rf) - np.asarray(rc))))
        print("%-34s %12.4f %12.4f %8.1fx %11.2e" % (name, tf, tc, tf / tc, diff))


if __name__ == "__main__":
    main()
