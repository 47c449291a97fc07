"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--rows 100000] [--k 10] [--repeat 5]

Both backends receive identical inputs; the script also reports the largest
absolute difference between their outputs.
"""
import argparse
import math
import timeit

import numpy as np

from momentineq import _pure

try:
    from momentineq import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def cases(rows, k, rng):
    z = np.ascontiguousarray(rng.standard_normal((rows, k)))
    theta = np.zeros(rows)
    return [
        ("sp_rows p=1", "sp_rows", (z, theta, 1.0)),
        ("sp_rows p=2", "sp_rows", (z, theta, 2.0)),
        ("sp_rows p=3.5", "sp_rows", (z, theta, 3.5)),
        ("sp_rows p=inf", "sp_rows", (z, theta, math.inf)),
        ("invert_rows p=1", "invert_rows", (z, 6.0, 1.0, 1e-8)),
        ("invert_rows p=2", "invert_rows", (z, 3.4, 2.0, 1e-8)),
        ("invert_rows p=inf (bisect)", "invert_rows", (z, 2.6, math.inf, 1e-8)),
        ("neg_logsumexp_rows b=2", "neg_logsumexp_rows", (z, 2.0)),
    ]


def best_time(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=100_000)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"rows={args.rows} k={args.k} repeat={args.repeat} (best of repeats, seconds)")
    if _compiled is None:
        print("compiled extension not available; timing the NumPy fallback only")
    print(f"{'kernel':<28}{'numpy':>10}{'cython':>10}{'speedup':>9}{'max diff':>11}")
    for label, name, call_args in cases(args.rows, args.k, rng):
        pure_fn = getattr(_pure, name)
        t_pure = best_time(pure_fn, call_args, args.repeat)
        if _compiled is None:
            print(f"{label:<28}{t_pure:>10.4f}")
            continue
        fast_fn = getattr(_compiled, name)
        t_fast = best_time(fast_fn, call_args, args.repeat)
        diff = np.max(np.abs(np.asarray(pure_fn(*call_args)) - np.asarray(fast_fn(*call_args))))
        print(f"{label:<28}{t_pure:>10.4f}{t_fast:>10.4f}{t_pure / t_fast:>8.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
