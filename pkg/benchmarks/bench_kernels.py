"""Compare the compiled kernels with the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Both backends
are imported directly, so the environment switch is not needed.
"""
import argparse
import timeit

import numpy as np

from mocert import _kernels_py

try:
    from mocert import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    F2 = rng.random((2000, 2))
    F3 = rng.random((800, 3))
    eps = np.zeros(3)
    G = rng.standard_normal((2, 3))
    Q = G.T @ G
    lip = float(np.linalg.eigvalsh(Q)[-1])
    c0 = np.full(3, 1.0 / 3.0)
    return {
        "dominated_mask N=2000 m=2": lambda k: k.dominated_mask(F2, np.zeros(2), True),
        "point_tradeoff N=800 m=3": lambda k: k.point_tradeoff(F3[0], F3, eps),
        "min_tradeoff_bounds 100x800 m=3": lambda k: k.min_tradeoff_bounds(F3[:100], F3, eps),
        "project_simplex k=3": lambda k: k.project_simplex(np.array([0.6, 0.6, -0.1])),
        "min_norm_pg k=3": lambda k: k.min_norm_pg(Q, 3, c0, lip, 1e-10, 50000),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run `pip install -e .` first")
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, call in cases(rng).items():
        a, b = call(_kernels_py), call(_kernels)
        for u, v in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
            assert np.array_equal(np.asarray(u), np.asarray(v), equal_nan=True) or \
                np.allclose(u, v, atol=1e-12, equal_nan=True), name
        tp = min(timeit.repeat(lambda: call(_kernels_py), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: call(_kernels), number=1, repeat=args.repeat))
        print(f"{name:34s} {1e3 * tp:12.3f} {1e3 * tc:12.3f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
