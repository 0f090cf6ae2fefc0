"""Multi-output random forest regression.

Trees are CART regressors grown best-first: the frontier leaf with the
largest impurity decrease splits next, until the leaf budget is spent
or no split helps. Impurity is total squared error summed over output
columns. The forest averages per-tree leaf means over bootstrapped
trees; per-tree seeds derive from (seed, tree index) so the result is
independent of training thread count.
"""

import heapq
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels, linalg, rng
from .errors import NotFittedError, ParameterError, ShapeError


@dataclass
class ForestConfig:
    n_trees: int = 100
    max_leaf_nodes: int = 200
    min_samples_leaf: int = 1
    feature_fraction: float = 1.0
    bootstrap: bool = True
    seed: int = 0

    def validate(self):
        if self.n_trees < 1:
            raise ParameterError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.max_leaf_nodes < 1:
            raise ParameterError(f"max_leaf_nodes must be >= 1, got {self.max_leaf_nodes}")
        if self.min_samples_leaf < 1:
            raise ParameterError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if not 0.0 < self.feature_fraction <= 1.0:
            raise ParameterError(
                f"feature_fraction must be in (0, 1], got {self.feature_fraction}"
            )


class RegressionTree:
    """Array-of-nodes CART tree.

    Parallel arrays: internal nodes have feature >= 0, a threshold and
    two children; leaves have feature == -1 and an index into
    leaf_values / leaf_counts.
    """

    def __init__(self, feature, threshold, left, right, leaf_id, leaf_values, leaf_counts):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.leaf_id = leaf_id
        self.leaf_values = leaf_values
        self.leaf_counts = leaf_counts

    @property
    def n_leaves(self):
        return self.leaf_values.shape[0]

    def apply(self, X):
        """Per-row leaf index."""
        X = linalg.as_dense(X)
        return _kernels.tree_apply(
            self.feature, self.threshold, self.left, self.right, self.leaf_id, X
        )

    def predict(self, X):
        return self.leaf_values[self.apply(X)]


class _NodeBuilder:
    """Mutable node store used only during growth."""

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []

    def add(self):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        return len(self.feature) - 1


def tree_fit(X, Y, config, gen):
    """Grow one tree on (X, Y) with the given random generator.

    The generator drives only the per-split feature subsets; split
    choice itself is deterministic (ties break on lower feature index,
    then lower threshold).
    """
    X = np.ascontiguousarray(linalg.as_dense(X))
    Y = np.ascontiguousarray(linalg.as_dense(Y))
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"row mismatch: X {X.shape} vs Y {Y.shape}")
    if X.shape[0] == 0:
        raise ParameterError("tree fit on empty input")
    config.validate()
    n, p = X.shape
    n_features = max(1, int(np.ceil(config.feature_fraction * p)))
    all_features = np.arange(p, dtype=np.int64)

    nodes = _NodeBuilder()
    root = nodes.add()
    leaf_members = {root: np.arange(n, dtype=np.int64)}

    def candidate(node):
        idx = leaf_members[node]
        if idx.shape[0] < 2 * config.min_samples_leaf or idx.shape[0] < 2:
            return None
        if n_features < p:
            feats = np.sort(gen.choice(p, size=n_features, replace=False)).astype(np.int64)
        else:
            feats = all_features
        f, thr, gain = _kernels.best_split(X, Y, idx, feats, config.min_samples_leaf)
        if f < 0 or gain <= 0.0:
            return None
        return gain, f, thr

    # best-first frontier ordered by impurity decrease; heap ties break
    # on insertion order for determinism
    heap = []
    counter = 0
    cand = candidate(root)
    if cand is not None and config.max_leaf_nodes > 1:
        heapq.heappush(heap, (-cand[0], counter, root, cand[1], cand[2]))
        counter += 1

    n_leaves = 1
    while heap and n_leaves < config.max_leaf_nodes:
        neg_gain, _, node, f, thr = heapq.heappop(heap)
        idx = leaf_members.pop(node)
        go_left = X[idx, f] <= thr
        left_idx = idx[go_left]
        right_idx = idx[~go_left]
        lc = nodes.add()
        rc = nodes.add()
        nodes.feature[node] = f
        nodes.threshold[node] = thr
        nodes.left[node] = lc
        nodes.right[node] = rc
        leaf_members[lc] = left_idx
        leaf_members[rc] = right_idx
        n_leaves += 1
        for child in (lc, rc):
            if n_leaves >= config.max_leaf_nodes:
                break
            cand = candidate(child)
            if cand is not None:
                heapq.heappush(heap, (-cand[0], counter, child, cand[1], cand[2]))
                counter += 1

    feature = np.array(nodes.feature, dtype=np.int64)
    threshold = np.array(nodes.threshold, dtype=np.float64)
    left = np.array(nodes.left, dtype=np.int64)
    right = np.array(nodes.right, dtype=np.int64)
    leaf_id = np.full(feature.shape[0], -1, dtype=np.int64)
    leaf_values = np.empty((len(leaf_members), Y.shape[1]))
    leaf_counts = np.empty(len(leaf_members), dtype=np.int64)
    for j, (node, idx) in enumerate(sorted(leaf_members.items())):
        leaf_id[node] = j
        leaf_values[j] = Y[idx].mean(axis=0)
        leaf_counts[j] = idx.shape[0]
    return RegressionTree(feature, threshold, left, right, leaf_id, leaf_values, leaf_counts)


class ForestModel:
    kind = "forest"

    def __init__(self, config, trees=None, input_dim=None, output_dim=None):
        self.config = config
        self.trees = trees
        self.input_dim = input_dim
        self.output_dim = output_dim

    def predict(self, X):
        """Arithmetic mean of per-tree predictions."""
        if not self.trees:
            raise NotFittedError("forest has no trees; call forest_fit first")
        X = linalg.as_dense(X)
        if X.shape[1] != self.input_dim:
            raise ShapeError(f"expected {self.input_dim} input columns, got {X.shape[1]}")
        acc = np.zeros((X.shape[0], self.output_dim))
        for tree in self.trees:
            acc += tree.predict(X)
        return acc / len(self.trees)

    def fit(self, X, Y):
        fitted = forest_fit(X, Y, self.config)
        self.trees = fitted.trees
        self.input_dim = fitted.input_dim
        self.output_dim = fitted.output_dim
        return self


def forest_fit(X, Y, config, threads=1):
    """Fit n_trees bootstrapped trees; deterministic for any thread count."""
    X = np.ascontiguousarray(linalg.as_dense(X))
    Y = np.ascontiguousarray(linalg.as_dense(Y))
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"row mismatch: X {X.shape} vs Y {Y.shape}")
    if X.shape[0] == 0:
        raise ParameterError("forest fit on empty input")
    config.validate()
    n = X.shape[0]

    def build(i):
        gen = rng.substream(config.seed, 0xF0, i)
        if config.bootstrap:
            rows = gen.integers(0, n, size=n)
            return tree_fit(X[rows], Y[rows], config, gen)
        return tree_fit(X, Y, config, gen)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(build, range(config.n_trees)))
    else:
        trees = [build(i) for i in range(config.n_trees)]
    return ForestModel(config, trees, X.shape[1], Y.shape[1])
