"""Feature preprocessing: constant-column removal, log1p, truncated-SVD
projection and z-score normalization.

The pipeline is fit once on training rows and the resulting Projector is
applied unchanged to every split, so validation data never leaks into
the projection or the scaling statistics.
"""

import numpy as np
import scipy.sparse as sp

from . import linalg
from .errors import DomainError, ParameterError, ShapeError

STD_FLOOR = 1e-8


def drop_constant_columns(X, tol=0.0):
    """Remove columns whose max - min <= tol.

    Returns (reduced matrix, boolean mask of kept columns). Column
    order is preserved. Raises when every column is constant.
    """
    if sp.issparse(X):
        Xc = X.tocsc()
        mx = Xc.max(axis=0).toarray().ravel()
        mn = Xc.min(axis=0).toarray().ravel()
        mask = (mx - mn) > tol
        if not mask.any():
            raise ParameterError("no informative features: all columns constant")
        return Xc[:, mask].tocoo(), mask
    X = linalg.as_dense(X)
    if X.size == 0:
        raise ParameterError("drop_constant_columns on empty matrix")
    spread = X.max(axis=0) - X.min(axis=0)
    mask = spread > tol
    if not mask.any():
        raise ParameterError("no informative features: all columns constant")
    return X[:, mask], mask


def log1p_transform(X):
    """Elementwise ln(1 + x) for nonnegative count data."""
    if sp.issparse(X):
        coo = X.tocoo()
        if coo.nnz and coo.data.min() < 0:
            i = int(np.argmin(coo.data))
            raise DomainError(
                f"negative entry {coo.data[i]} at ({coo.row[i]}, {coo.col[i]})"
            )
        out = coo.copy()
        out.data = np.log1p(out.data)
        return out
    X = linalg.as_dense(X)
    if (X < 0).any():
        r, c = np.argwhere(X < 0)[0]
        raise DomainError(f"negative entry {X[r, c]} at ({r}, {c})")
    return np.log1p(X)


class Projector:
    """Fitted preprocessing state: column mask + TSVD projection + scaler.

    Attributes
    ----------
    kept_columns : bool array over original columns
    components : (surviving_cols x k) projection matrix (right singular
        vectors of the training matrix)
    singular_values : length-k, nonincreasing
    mean, std : per-output-column z-score statistics of the projected
        training data; std is floored at 1e-8
    """

    def __init__(self, kept_columns, components, singular_values, mean, std):
        self.kept_columns = np.asarray(kept_columns, dtype=bool)
        self.components = np.asarray(components, dtype=np.float64)
        self.singular_values = np.asarray(singular_values, dtype=np.float64)
        self.mean = np.asarray(mean, dtype=np.float64)
        self.std = np.asarray(std, dtype=np.float64)

    @property
    def k(self):
        return self.components.shape[1]

    def apply(self, X):
        """Project new data with the stored mask, factors and scaling."""
        width = self.kept_columns.shape[0]
        if X.shape[1] != width:
            raise ShapeError(f"expected {width} columns, got {X.shape[1]}")
        if sp.issparse(X):
            Z = (X.tocsr()[:, self.kept_columns] @ self.components)
            Z = np.asarray(Z)
        else:
            Z = linalg.as_dense(X)[:, self.kept_columns] @ self.components
        return (Z - self.mean) / self.std


def projector_fit(X, k, rng, constant_tol=0.0, oversample=10, power_iters=2):
    """Fit mask -> TSVD -> z-score on a training matrix."""
    Xr, mask = drop_constant_columns(X, tol=constant_tol)
    n = Xr.shape[0]
    d = Xr.shape[1]
    if not 1 <= k <= min(n, d):
        raise ParameterError(f"k={k} outside [1, {min(n, d)}] after masking to {d} columns")
    U, S, V = linalg.svd_truncated(Xr, k, oversample=oversample, power_iters=power_iters, rng=rng)
    Z = (Xr @ V) if not sp.issparse(Xr) else np.asarray(Xr.tocsr() @ V)
    mean = Z.mean(axis=0)
    std = np.maximum(Z.std(axis=0), STD_FLOOR)
    return Projector(mask, V, S, mean, std)
