"""Extreme learning machine regression.

Random frozen hidden layer H = f(X W_in + b); the output weights are
the closed-form least-squares solution W_out = pinv(H) T.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg, rng
from .errors import NotFittedError, ParameterError, ShapeError


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


ACTIVATIONS = {
    "tanh": np.tanh,
    "sigmoid": _sigmoid,
    "relu": lambda z: np.maximum(z, 0.0),
}


@dataclass
class ElmConfig:
    hidden_size: int = 8000
    activation: str = "tanh"
    seed: int = 0

    def validate(self):
        if self.hidden_size < 1:
            raise ParameterError(f"hidden_size must be >= 1, got {self.hidden_size}")
        if self.activation not in ACTIVATIONS:
            raise ParameterError(
                f"unknown activation {self.activation!r}; choose from {sorted(ACTIVATIONS)}"
            )


class ElmModel:
    """Random hidden layer with a closed-form linear readout.

    W_in and b are frozen at initialization; fit only sets W_out.
    """

    kind = "elm"

    def __init__(self, config, W_in, b, W_out=None):
        self.config = config
        self.W_in = W_in
        self.b = b
        self.W_out = W_out

    @property
    def input_dim(self):
        return self.W_in.shape[0]

    def hidden(self, X):
        """H = f(X W_in + b), one row per sample."""
        X = linalg.as_dense(X)
        if X.shape[1] != self.input_dim:
            raise ShapeError(f"expected {self.input_dim} input columns, got {X.shape[1]}")
        f = ACTIVATIONS[self.config.activation]
        return f(X @ self.W_in + self.b)

    def fit(self, X, T):
        """W_out = pinv(H) T, the Frobenius-minimal readout."""
        T = linalg.as_dense(T)
        H = self.hidden(X)
        if H.shape[0] != T.shape[0]:
            raise ShapeError(f"row mismatch: X rows {H.shape[0]} vs T rows {T.shape[0]}")
        if H.shape[0] == 0:
            raise ParameterError("elm fit on empty input")
        self.W_out = linalg.pinv(H) @ T
        return self

    def predict(self, X_new):
        if self.W_out is None:
            raise NotFittedError("elm model has no output weights; call fit first")
        return self.hidden(X_new) @ self.W_out


def elm_init(config, input_dim):
    """Draw W_in and b uniform in [-1, 1], deterministically under seed."""
    config.validate()
    if input_dim < 1:
        raise ParameterError(f"input_dim must be >= 1, got {input_dim}")
    gen = rng.substream(config.seed, 0xE1)
    W_in = gen.uniform(-1.0, 1.0, size=(input_dim, config.hidden_size))
    b = gen.uniform(-1.0, 1.0, size=config.hidden_size)
    return ElmModel(config, W_in, b)
