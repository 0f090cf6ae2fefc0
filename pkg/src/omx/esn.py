"""Echo state network regression.

A fixed random input map W_in and sparse recurrent reservoir W (scaled
to a target spectral radius < 1) drive a tanh state map; only the
linear readout W_out is trained, by ridge regression on the states.

Cells are i.i.d. samples rather than a time series, so the state is
reset to zero for every sample and the update x <- tanh(W_in u + W x)
is iterated to its fixed point (unique because rho < 1 makes the map a
contraction). Results are therefore independent of row order.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg, rng
from .errors import NotFittedError, ParameterError, ShapeError


@dataclass
class EsnConfig:
    reservoir_size: int = 512
    spectral_radius: float = 0.4
    input_scale: float = 1.0
    reservoir_density: float = 0.1
    state_iters: int = 30
    state_tol: float = 1e-8
    ridge_lambda: float = 1e-6
    seed: int = 0

    def validate(self):
        if not 0.0 < self.spectral_radius < 1.0:
            raise ParameterError(
                f"spectral_radius must be in (0, 1), got {self.spectral_radius}"
            )
        if self.reservoir_size < 1:
            raise ParameterError(f"reservoir_size must be >= 1, got {self.reservoir_size}")
        if not 0.0 < self.reservoir_density <= 1.0:
            raise ParameterError(
                f"reservoir_density must be in (0, 1], got {self.reservoir_density}"
            )


class EsnModel:
    """Initialized (and optionally fitted) echo state network.

    W_in and W are frozen at initialization; fit only sets W_out.
    """

    kind = "esn"

    def __init__(self, config, W_in, W, W_out=None):
        self.config = config
        self.W_in = W_in
        self.W = W
        self.W_out = W_out

    @property
    def input_dim(self):
        return self.W_in.shape[1]

    def states(self, X, x0=None):
        """Per-sample fixed-point reservoir states, one row per sample.

        All rows iterate together; a row stops updating once its own
        step change falls below state_tol, so each state depends only
        on its sample. `x0` overrides the zero initial state (the echo
        state property makes the result independent of it).
        """
        X = linalg.as_dense(X)
        if X.shape[1] != self.input_dim:
            raise ShapeError(f"expected {self.input_dim} input columns, got {X.shape[1]}")
        cfg = self.config
        drive = X @ self.W_in.T
        if x0 is None:
            x = np.zeros((X.shape[0], cfg.reservoir_size))
        else:
            x = np.array(x0, dtype=np.float64, copy=True)
        active = np.arange(X.shape[0])
        for _ in range(cfg.state_iters):
            x_new = np.tanh(drive[active] + x[active] @ self.W.T)
            delta = np.abs(x_new - x[active]).max(axis=1)
            x[active] = x_new
            still = delta >= cfg.state_tol
            active = active[still]
            if active.size == 0:
                break
        return x

    def fit(self, X, Y):
        """Train the readout: ridge regression of Y on [state, 1]."""
        X = linalg.as_dense(X)
        Y = linalg.as_dense(Y)
        if X.shape[0] != Y.shape[0]:
            raise ShapeError(f"row mismatch: X {X.shape} vs Y {Y.shape}")
        if X.shape[0] == 0:
            raise ParameterError("esn fit on empty input")
        design = _with_bias(self.states(X))
        self.W_out = linalg.ridge_solve(design, Y, self.config.ridge_lambda)
        return self

    def predict(self, X):
        if self.W_out is None:
            raise NotFittedError("esn model has no readout; call fit first")
        return _with_bias(self.states(X)) @ self.W_out


def _with_bias(states):
    return np.hstack([states, np.ones((states.shape[0], 1))])


def esn_init(config, input_dim):
    """Draw W_in and W for the given input width, deterministically.

    W_in is uniform in [-input_scale, input_scale]; W is sparse with
    the configured density, uniform in [-1, 1], rescaled so its
    estimated spectral radius equals the target. Degenerate draws with
    a near-zero radius are reseeded up to 3 times.
    """
    config.validate()
    if input_dim < 1:
        raise ParameterError(f"input_dim must be >= 1, got {input_dim}")
    n = config.reservoir_size
    gen = rng.substream(config.seed, 0xE5)
    W_in = gen.uniform(-config.input_scale, config.input_scale, size=(n, input_dim))
    for attempt in range(4):
        W = gen.uniform(-1.0, 1.0, size=(n, n))
        if config.reservoir_density < 1.0:
            keep = gen.random((n, n)) < config.reservoir_density
            W = np.where(keep, W, 0.0)
        rho = linalg.spectral_radius_estimate(W)
        if rho >= 1e-9:
            W *= config.spectral_radius / rho
            return EsnModel(config, W_in, W)
    raise ParameterError(
        "reservoir draw degenerate (spectral radius ~ 0) after 3 reseeds; "
        "increase reservoir_density or reservoir_size"
    )
