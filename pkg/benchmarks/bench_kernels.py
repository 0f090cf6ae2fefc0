"""Compare the compiled tree kernels against the pure-numpy fallback.

Runs the two hot kernels (split search and leaf routing) and a whole
forest fit on the same data through both implementations, checks they
agree exactly, and prints wall-time ratios.

Usage: python3 benchmarks/bench_kernels.py [--n 4000] [--p 64] [--q 16]
"""

import argparse
import time

import numpy as np

from omx import rng
from omx._kernels import _fallback
from omx.forest import ForestConfig, forest_fit

try:
    from omx._kernels import _native
except ImportError:
    _native = None


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_best_split(X, Y):
    idx = np.arange(X.shape[0], dtype=np.int64)
    features = np.arange(X.shape[1], dtype=np.int64)
    results = {}
    for name, mod in (("native", _native), ("fallback", _fallback)):
        if mod is None:
            continue
        results[name] = timeit(lambda m=mod: m.best_split(X, Y, idx, features, 1))
    return results


def bench_tree_apply(X, Y):
    tree = forest_fit(X, Y, ForestConfig(n_trees=1, max_leaf_nodes=200, seed=0)).trees[0]
    args = (tree.feature, tree.threshold, tree.left, tree.right, tree.leaf_id)
    results = {}
    for name, mod in (("native", _native), ("fallback", _fallback)):
        if mod is None:
            continue
        results[name] = timeit(lambda m=mod: m.tree_apply(*args, X))
    return results


def bench_forest(X, Y):
    import omx._kernels as kernels

    results = {}
    cfg = ForestConfig(n_trees=20, max_leaf_nodes=100, seed=0)
    saved = (kernels.best_split, kernels.tree_apply)
    try:
        for name, mod in (("native", _native), ("fallback", _fallback)):
            if mod is None:
                continue
            kernels.best_split, kernels.tree_apply = mod.best_split, mod.tree_apply
            model, secs = timeit(lambda: forest_fit(X, Y, cfg), repeats=1)
            results[name] = (model.predict(X[:200]), secs)
    finally:
        kernels.best_split, kernels.tree_apply = saved
    return results


def report(label, results):
    if "native" not in results:
        print(f"{label:12s} fallback {results['fallback'][1] * 1e3:9.2f} ms "
              "(compiled kernel unavailable)")
        return
    nat, fb = results["native"], results["fallback"]
    agree = np.array_equal(np.asarray(nat[0]), np.asarray(fb[0]))
    print(f"{label:12s} native {nat[1] * 1e3:9.2f} ms   fallback {fb[1] * 1e3:9.2f} ms   "
          f"speedup {fb[1] / nat[1]:5.1f}x   identical={agree}")
    if not agree:
        raise SystemExit(f"{label}: implementations disagree")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--p", type=int, default=64)
    ap.add_argument("--q", type=int, default=16)
    args = ap.parse_args()

    gen = rng.stream(0)
    X = gen.standard_normal((args.n, args.p))
    Y = gen.standard_normal((args.n, args.q))
    print(f"n={args.n} features={args.p} outputs={args.q}")
    report("best_split", bench_best_split(X, Y))
    report("tree_apply", bench_tree_apply(X, Y))
    report("forest_fit", bench_forest(X, Y))


if __name__ == "__main__":
    main()
