"""Synthetic cross-modality task generator.

Produces a desk-scale stand-in for the real paired-measurement data:
a shared low-rank latent state Z with per-group offsets drives both a
sparse nonnegative input modality and a dense target modality. The
latent loading B_true gives a computable performance ceiling (the
"ideal predictor" Z B_true).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import rng
from .errors import ParameterError


@dataclass
class SynthSpec:
    n_cells: int = 2000
    d_input: int = 256
    d_output: int = 32
    latent_rank: int = 8
    noise_sigma: float = 0.05
    n_groups: int = 6
    sparsity: float = 0.5
    group_offset_scale: float = 0.5
    seed: int = 0

    def validate(self):
        if self.latent_rank > min(self.d_input, self.d_output):
            raise ParameterError(
                f"latent_rank {self.latent_rank} exceeds min(d_input, d_output)"
            )
        if self.n_groups < 3:
            raise ParameterError(f"need n_groups >= 3 for grouped 3-fold CV, got {self.n_groups}")
        if self.noise_sigma < 0:
            raise ParameterError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0.0 <= self.sparsity < 1.0:
            raise ParameterError(f"sparsity must be in [0, 1), got {self.sparsity}")
        if self.n_cells < self.n_groups:
            raise ParameterError("fewer cells than groups")


@dataclass
class SynthTask:
    """Generated task plus the latent ground truth behind it."""

    X: sp.coo_matrix
    Y: np.ndarray
    groups: np.ndarray
    B_true: np.ndarray
    Z: np.ndarray

    @property
    def ideal_predictions(self):
        """What a predictor knowing the true latent state would output."""
        return self.Z @ self.B_true


def gen_task(spec):
    """Generate (X sparse counts, Y dense targets, groups, B_true)."""
    t = gen_task_full(spec)
    return t.X, t.Y, t.groups, t.B_true


def gen_task_full(spec):
    """Like gen_task but keeps the latent Z for oracle-grade checks.

    Z ~ N(0, I) plus a per-group latent offset; X is the rectified,
    quantile-thresholded projection Z A + noise (threshold placed so the
    declared sparsity holds exactly); Y = Z B_true + noise.
    """
    spec.validate()
    gen = rng.stream(spec.seed)
    n, r = spec.n_cells, spec.latent_rank

    groups = np.arange(n, dtype=np.int64) % spec.n_groups
    groups = gen.permutation(groups)

    Z = gen.standard_normal((n, r))
    offsets = gen.standard_normal((spec.n_groups, r)) * spec.group_offset_scale
    Z = Z + offsets[groups]

    A = gen.standard_normal((r, spec.d_input)) / np.sqrt(r)
    raw = Z @ A + spec.noise_sigma * gen.standard_normal((n, spec.d_input))
    thresh = np.quantile(raw, spec.sparsity)
    X = np.maximum(raw - thresh, 0.0)

    B_true = gen.standard_normal((r, spec.d_output)) / np.sqrt(r)
    Y = Z @ B_true + spec.noise_sigma * gen.standard_normal((n, spec.d_output))

    return SynthTask(sp.coo_matrix(X), Y, groups, B_true, Z)
