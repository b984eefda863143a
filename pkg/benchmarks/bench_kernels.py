"""Time the compiled and pure-Python tree kernels on the same growth problems.

    python benchmarks/bench_kernels.py [--rows 5000] [--repeat 3]

Both backends must produce identical trees; the script checks that before
reporting timings.
"""
import argparse
import time

import numpy as np

from fmcloss.models import tree as tree_mod
from fmcloss.models.tree import NEWTON, VARIANCE, Tree, presort


def problem(n, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    y = 10 + 3 * np.sin(X[:, 0]) + X[:, 1] * X[:, 2] + rng.normal(0, 0.5, n)
    w = np.exp(-0.1 * np.abs(y))
    return X, y, w


def grow(X, order, y, w, criterion, backend, depth):
    n, p = X.shape
    feats = np.arange(p, dtype=np.intp)
    inc = np.ones(n, bool)
    if criterion == VARIANCE:
        return Tree.grow(X, order, feats, inc, w * y, w, VARIANCE, max_depth=depth,
                         backend=backend)
    g, h = 2 * w * (y.mean() - y), 2 * w
    return Tree.grow(X, order, feats, inc, g, h, NEWTON, max_depth=depth, reg_lambda=1.0,
                     gamma=0.1, min_child_weight=1.0, backend=backend)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=5000)
    ap.add_argument("--features", type=int, default=9)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if tree_mod.BACKEND != "cython":
        print("compiled kernel not available; only the Python backend can run")
    X, y, w = problem(args.rows, args.features, args.seed)
    order = presort(X)
    print(f"{args.rows} rows x {args.features} features, best of {args.repeat}")
    print(f"{'task':<24}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for criterion, depth, label in ((VARIANCE, 8, "forest tree, depth 8"),
                                    (NEWTON, 4, "boost tree, depth 4")):
        tp, a = best_of(lambda: grow(X, order, y, w, criterion, "python", depth), args.repeat)
        tp_apply, _ = best_of(lambda: a.apply(X, "python"), args.repeat)
        if tree_mod.BACKEND != "cython":
            print(f"{label:<24}{tp:>12.4f}{'-':>12}{'-':>10}")
            continue
        tc, b = best_of(lambda: grow(X, order, y, w, criterion, "cython", depth), args.repeat)
        tc_apply, _ = best_of(lambda: b.apply(X, "cython"), args.repeat)
        if not (np.array_equal(a.value, b.value) and np.array_equal(a.threshold, b.threshold)):
            raise SystemExit("backends disagree; timings are meaningless")
        print(f"{label:<24}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")
        print(f"{'  apply':<24}{tp_apply:>12.4f}{tc_apply:>12.4f}{tp_apply / tc_apply:>9.1f}x")


if __name__ == "__main__":
    main()
