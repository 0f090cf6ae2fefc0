import numpy as np
import pytest
import scipy.sparse as sp

from omx import metrics
from omx.datagen import SynthSpec, gen_task, gen_task_full
from omx.errors import ParameterError
from omx.linalg import ridge_solve


class TestGenTask:
    def test_default_desk_shapes(self):
        spec = SynthSpec(seed=1)
        X, Y, groups, B_true = gen_task(spec)
        assert X.shape == (2000, 256)
        assert Y.shape == (2000, 32)
        assert groups.shape == (2000,)
        assert B_true.shape == (8, 32)
        assert sp.issparse(X)

    def test_deterministic(self):
        a = gen_task_full(SynthSpec(seed=5))
        b = gen_task_full(SynthSpec(seed=5))
        assert np.array_equal(a.Y, b.Y)
        assert np.array_equal(np.asarray(a.X.todense()), np.asarray(b.X.todense()))
        assert np.array_equal(a.groups, b.groups)

    def test_sparsity_within_two_percent(self):
        for target in (0.3, 0.5, 0.8):
            spec = SynthSpec(sparsity=target, seed=2)
            X, _, _, _ = gen_task(spec)
            zero_frac = 1.0 - X.nnz / (X.shape[0] * X.shape[1])
            assert abs(zero_frac - target) <= 0.02

    def test_nonnegative_counts(self):
        X, _, _, _ = gen_task(SynthSpec(seed=3))
        assert X.data.min() >= 0.0

    def test_noiseless_full_rank_recovery(self):
        spec = SynthSpec(
            n_cells=500, d_input=64, d_output=8, latent_rank=8, noise_sigma=0.0, seed=4
        )
        t = gen_task_full(spec)
        # regression of Y on the true latent recovers it exactly
        B = ridge_solve(t.Z, t.Y, 0.0)
        assert np.abs(t.Z @ B - t.Y).max() < 1e-8

    def test_group_offsets_separate_group_means(self):
        t = gen_task_full(SynthSpec(seed=6))
        means = np.stack([t.Z[t.groups == g].mean(axis=0) for g in range(6)])
        dists = [
            np.linalg.norm(means[i] - means[j])
            for i in range(6)
            for j in range(i + 1, 6)
        ]
        assert min(dists) > 0.5

    def test_all_groups_present_and_balanced(self):
        t = gen_task_full(SynthSpec(n_cells=100, n_groups=5, seed=7))
        counts = np.bincount(t.groups, minlength=5)
        assert counts.min() == 20 and counts.max() == 20

    def test_signal_ceiling(self):
        t = gen_task_full(SynthSpec(noise_sigma=0.01, seed=8))
        assert metrics.correlation_score(t.Y, t.ideal_predictions) >= 0.99

    def test_spec_validation(self):
        with pytest.raises(ParameterError):
            gen_task(SynthSpec(latent_rank=64, d_output=32))
        with pytest.raises(ParameterError):
            gen_task(SynthSpec(n_groups=2))
        with pytest.raises(ParameterError):
            gen_task(SynthSpec(noise_sigma=-0.1))
        with pytest.raises(ParameterError):
            gen_task(SynthSpec(sparsity=1.0))
