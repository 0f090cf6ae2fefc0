"""Evaluation metrics: per-cell correlation score and MSE.

The correlation score is the mean over cells (rows) of the Pearson
correlation between the predicted and true output vectors. Rows where
either vector is constant contribute 0 and are counted in
`diagnostics.zero_variance_rows` rather than producing NaN. Column-
averaged and flattened variants are exposed for sensitivity checks.
"""

import numpy as np

from .errors import ParameterError, ShapeError


class Diagnostics:
    """Counters for degenerate metric inputs."""

    def __init__(self):
        self.zero_variance_rows = 0

    def reset(self):
        self.zero_variance_rows = 0


diagnostics = Diagnostics()


def pearson_row(y_true, y_pred):
    """Sample Pearson correlation of two equal-length vectors."""
    a = np.asarray(y_true, dtype=np.float64).ravel()
    b = np.asarray(y_pred, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] < 2:
        raise ParameterError(f"pearson needs length >= 2, got {a.shape[0]}")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt((da * da).sum() * (db * db).sum())
    if denom == 0.0:
        diagnostics.zero_variance_rows += 1
        return 0.0
    return float((da * db).sum() / denom)


def _check_pair(Y_true, Y_pred, min_cols=1):
    A = np.asarray(Y_true, dtype=np.float64)
    B = np.asarray(Y_pred, dtype=np.float64)
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")
    if A.ndim != 2:
        raise ShapeError(f"expected 2-D matrices, got ndim={A.ndim}")
    if A.shape[1] < min_cols:
        raise ParameterError(f"need at least {min_cols} columns, got {A.shape[1]}")
    return A, B


def correlation_score(Y_true, Y_pred):
    """Mean per-row Pearson correlation (the default correlation score)."""
    A, B = _check_pair(Y_true, Y_pred, min_cols=2)
    da = A - A.mean(axis=1, keepdims=True)
    db = B - B.mean(axis=1, keepdims=True)
    num = (da * db).sum(axis=1)
    denom = np.sqrt((da * da).sum(axis=1) * (db * db).sum(axis=1))
    ok = denom > 0.0
    diagnostics.zero_variance_rows += int((~ok).sum())
    r = np.zeros(A.shape[0])
    r[ok] = num[ok] / denom[ok]
    return float(r.mean())


def correlation_score_colwise(Y_true, Y_pred):
    """Mean per-column Pearson correlation (sensitivity variant)."""
    A, B = _check_pair(Y_true, Y_pred)
    if A.shape[0] < 2:
        raise ParameterError("colwise variant needs >= 2 rows")
    return correlation_score(A.T, B.T)

def correlation_score_flat(Y_true, Y_pred):
    """Pearson correlation of the flattened matrices (sensitivity variant)."""
    A, B = _check_pair(Y_true, Y_pred)
    return pearson_row(A.ravel(), B.ravel())


def mse(Y_true, Y_pred):
    """Mean over all entries of the squared error."""
    A, B = _check_pair(Y_true, Y_pred)
    d = A - B
    return float((d * d).mean())
