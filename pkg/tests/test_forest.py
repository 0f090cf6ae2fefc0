import numpy as np
import pytest

from omx import forest, rng
from omx.errors import NotFittedError, ParameterError

from oracles import best_split_exhaustive


def fit_tree(X, Y, max_leaf_nodes=200, min_samples_leaf=1, seed=0, feature_fraction=1.0):
    cfg = forest.ForestConfig(
        n_trees=1,
        max_leaf_nodes=max_leaf_nodes,
        min_samples_leaf=min_samples_leaf,
        feature_fraction=feature_fraction,
        seed=seed,
    )
    return forest.tree_fit(np.asarray(X, float), np.asarray(Y, float), cfg, rng.stream(seed))


class TestTreeFit:
    def test_single_leaf_budget_is_mean_predictor(self):
        X = np.array([[0.0], [1.0], [2.0]])
        Y = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 9.0]])
        tree = fit_tree(X, Y, max_leaf_nodes=1)
        assert tree.n_leaves == 1
        pred = tree.predict(np.array([[7.0]]))
        assert np.allclose(pred, Y.mean(axis=0), atol=1e-12)

    def test_pure_split(self):
        X = np.array([[0.0], [0.0], [1.0], [1.0]])
        Y = np.array([[0.0], [0.0], [1.0], [1.0]])
        tree = fit_tree(X, Y)
        assert tree.n_leaves == 2
        assert tree.threshold[0] == 0.5
        assert np.abs(tree.predict(X) - Y).max() == 0.0

    def test_identical_targets_single_leaf(self):
        gen = rng.stream(1)
        X = gen.standard_normal((20, 3))
        Y = np.ones((20, 2)) * 4.0
        tree = fit_tree(X, Y)
        assert tree.n_leaves == 1

    def test_tie_breaks_to_lower_feature(self):
        # feature 0 and feature 1 give identical splits
        X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
        Y = np.array([[0.0], [0.0], [1.0], [1.0]])
        tree = fit_tree(X, Y)
        assert tree.feature[0] == 0

    def test_leaf_count_respects_budget(self):
        gen = rng.stream(2)
        X = gen.standard_normal((200, 4))
        Y = gen.standard_normal((200, 2))
        tree = fit_tree(X, Y, max_leaf_nodes=17)
        assert tree.n_leaves <= 17

    def test_first_split_matches_exhaustive_oracle(self):
        gen = rng.stream(3)
        for case in range(200):
            n = int(gen.integers(2, 9))
            X = np.round(gen.standard_normal((n, 2)), 1)
            Y = np.round(gen.standard_normal((n, 1)), 1)
            tree = fit_tree(X, Y, max_leaf_nodes=2)
            oracle = best_split_exhaustive(X, Y)
            if oracle is None:
                assert tree.n_leaves == 1, f"case {case}"
            else:
                f, thr, _ = oracle
                assert tree.feature[0] == f, f"case {case}"
                assert abs(tree.threshold[0] - thr) < 1e-12, f"case {case}"

    def test_leaf_mean_replay(self):
        gen = rng.stream(4)
        X = gen.standard_normal((150, 5))
        Y = gen.standard_normal((150, 3))
        tree = fit_tree(X, Y, max_leaf_nodes=30)
        leaves = tree.apply(X)
        for leaf in range(tree.n_leaves):
            members = leaves == leaf
            assert members.sum() == tree.leaf_counts[leaf]
            replay = Y[members].mean(axis=0)
            assert np.abs(replay - tree.leaf_values[leaf]).max() < 1e-10

    def test_every_split_strictly_reduces_impurity(self):
        gen = rng.stream(5)
        X = gen.standard_normal((100, 3))
        Y = gen.standard_normal((100, 2))
        tree = fit_tree(X, Y, max_leaf_nodes=20)

        def sse(rows):
            block = Y[rows]
            return ((block - block.mean(axis=0)) ** 2).sum()

        # replay routing down the tree, checking each internal node
        def walk(node, rows):
            if tree.feature[node] < 0:
                return
            go_left = X[rows, tree.feature[node]] <= tree.threshold[node]
            l, r = rows[go_left], rows[~go_left]
            assert sse(l) + sse(r) < sse(rows) - 1e-12
            walk(tree.left[node], l)
            walk(tree.right[node], r)

        walk(0, np.arange(100))

    def test_min_samples_leaf(self):
        gen = rng.stream(6)
        X = gen.standard_normal((60, 3))
        Y = gen.standard_normal((60, 1))
        tree = fit_tree(X, Y, max_leaf_nodes=40, min_samples_leaf=5)
        assert tree.leaf_counts.min() >= 5


class TestForest:
    def test_single_tree_no_bootstrap_equals_tree(self):
        gen = rng.stream(7)
        X = gen.standard_normal((50, 3))
        Y = gen.standard_normal((50, 2))
        cfg = forest.ForestConfig(n_trees=1, bootstrap=False, max_leaf_nodes=10, seed=3)
        model = forest.forest_fit(X, Y, cfg)
        tree = model.trees[0]
        assert np.array_equal(model.predict(X), tree.predict(X))

    def test_two_trees_average(self):
        cfg = forest.ForestConfig(n_trees=2, seed=0)
        model = forest.ForestModel(cfg, input_dim=1, output_dim=1)
        t0 = fit_tree([[0.0], [1.0]], [[0.0], [0.0]], max_leaf_nodes=1)
        t1 = fit_tree([[0.0], [1.0]], [[1.0], [1.0]], max_leaf_nodes=1)
        model.trees = [t0, t1]
        assert np.allclose(model.predict([[0.3]]), [[0.5]], atol=0)

    def test_constant_targets(self):
        gen = rng.stream(8)
        X = gen.standard_normal((40, 3))
        Y = np.full((40, 2), 3.5)
        cfg = forest.ForestConfig(n_trees=5, seed=4)
        model = forest.forest_fit(X, Y, cfg)
        assert np.allclose(model.predict(X), 3.5, atol=1e-12)

    def test_deterministic_across_thread_counts(self):
        gen = rng.stream(9)
        X = gen.standard_normal((120, 4))
        Y = gen.standard_normal((120, 2))
        cfg = forest.ForestConfig(n_trees=8, max_leaf_nodes=16, feature_fraction=0.5, seed=5)
        a = forest.forest_fit(X, Y, cfg, threads=1)
        b = forest.forest_fit(X, Y, cfg, threads=4)
        assert np.array_equal(a.predict(X), b.predict(X))

    def test_predictions_within_target_range(self):
        gen = rng.stream(10)
        X = gen.standard_normal((100, 3))
        Y = gen.standard_normal((100, 2))
        cfg = forest.ForestConfig(n_trees=10, max_leaf_nodes=20, seed=6)
        model = forest.forest_fit(X, Y, cfg)
        pred = model.predict(gen.standard_normal((50, 3)))
        for j in range(2):
            assert pred[:, j].min() >= Y[:, j].min() - 1e-12
            assert pred[:, j].max() <= Y[:, j].max() + 1e-12

    def test_training_set_exact_on_pure_split(self):
        X = np.array([[0.0], [0.0], [1.0], [1.0]])
        Y = np.array([[0.0], [0.0], [1.0], [1.0]])
        cfg = forest.ForestConfig(n_trees=3, bootstrap=False, seed=7)
        model = forest.forest_fit(X, Y, cfg)
        assert np.abs(model.predict(X) - Y).max() == 0.0

    def test_unfitted_rejected(self):
        model = forest.ForestModel(forest.ForestConfig())
        with pytest.raises(NotFittedError):
            model.predict(np.zeros((2, 3)))

    def test_bad_config_rejected(self):
        with pytest.raises(ParameterError):
            forest.forest_fit(np.zeros((2, 2)), np.zeros((2, 1)), forest.ForestConfig(n_trees=0))
        with pytest.raises(ParameterError):
            forest.forest_fit(
                np.zeros((2, 2)), np.zeros((2, 1)), forest.ForestConfig(feature_fraction=0.0)
            )


class TestKernelParity:
    def test_fallback_matches_native_split(self):
        from omx._kernels import _fallback

        try:
            from omx._kernels import _native
        except ImportError:
            pytest.skip("native kernel not built")
        gen = rng.stream(11)
        for _ in range(100):
            n = int(gen.integers(2, 40))
            p = int(gen.integers(1, 6))
            q = int(gen.integers(1, 4))
            X = np.round(gen.standard_normal((n, p)), 2)
            Y = gen.standard_normal((n, q))
            idx = np.arange(n, dtype=np.int64)
            feats = np.arange(p, dtype=np.int64)
            fa = _fallback.best_split(X, Y, idx, feats, 1)
            na = _native.best_split(X, Y, idx, feats, 1)
            assert fa[0] == na[0]
            assert abs(fa[1] - na[1]) < 1e-12
            assert abs(fa[2] - na[2]) < 1e-9

    def test_fallback_matches_native_apply(self):
        from omx._kernels import _fallback

        try:
            from omx._kernels import _native
        except ImportError:
            pytest.skip("native kernel not built")
        gen = rng.stream(12)
        X = gen.standard_normal((200, 4))
        Y = gen.standard_normal((200, 2))
        tree = fit_tree(X, Y, max_leaf_nodes=25)
        args = (tree.feature, tree.threshold, tree.left, tree.right, tree.leaf_id)
        assert np.array_equal(
            _fallback.tree_apply(*args, X), _native.tree_apply(*args, X)
        )
