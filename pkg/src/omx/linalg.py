"""Dense/sparse linear algebra primitives.

All functions are pure and deterministic given their inputs (and, where
randomized, the passed Generator). Matrices are float64 ndarrays in
row-major order; sparse inputs are scipy COO/CSR.
"""

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ParameterError, ShapeError


def as_dense(A):
    """Coerce input to a 2-D float64 ndarray (densifying sparse input)."""
    if sp.issparse(A):
        return np.asarray(A.todense(), dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={A.ndim}")
    return A


def matmul(A, B):
    """Matrix product with an explicit shape check."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def svd_truncated(A, k, oversample=10, power_iters=2, rng=None):
    """Randomized truncated SVD.

    Finds an approximate range basis from `k + oversample` Gaussian
    probes, refined by `power_iters` subspace iterations, then solves
    the small projected SVD exactly. Works on dense arrays and scipy
    sparse matrices without densifying the input.

    Returns (U, S, V) with U: n x k, S: length-k nonincreasing, V: d x k.
    """
    n, d = A.shape
    if not 1 <= k <= min(n, d):
        raise ParameterError(f"k={k} outside [1, {min(n, d)}] for shape {A.shape}")
    if rng is None:
        raise ParameterError("svd_truncated requires an explicit rng")
    ell = min(k + oversample, min(n, d))
    omega = rng.standard_normal((d, ell))
    Y = A @ omega
    Q, _ = np.linalg.qr(Y)
    for _ in range(power_iters):
        Z = A.T @ Q
        Z, _ = np.linalg.qr(Z)
        Y = A @ Z
        Q, _ = np.linalg.qr(Y)
    B = Q.T @ A if not sp.issparse(A) else (A.T @ Q).T
    Ub, S, Vt = np.linalg.svd(np.asarray(B), full_matrices=False)
    U = Q @ Ub
    return U[:, :k], S[:k], Vt[:k].T


def pinv(A, rcond=None):
    """Moore-Penrose pseudoinverse via SVD with a singular-value cutoff.

    Singular values <= rcond * sigma_max are treated as zero;
    rcond defaults to 1e-12 * max(m, n).
    """
    A = as_dense(A)
    m, n = A.shape
    if m == 0 or n == 0:
        raise ShapeError(f"pinv of empty matrix {A.shape}")
    if rcond is None:
        rcond = 1e-12 * max(m, n)
    U, S, Vt = np.linalg.svd(A, full_matrices=False)
    if S.size == 0 or S[0] == 0.0:
        return np.zeros((n, m))
    keep = S > rcond * S[0]
    inv_s = np.zeros_like(S)
    inv_s[keep] = 1.0 / S[keep]
    return np.ascontiguousarray((Vt.T * inv_s) @ U.T)


def ridge_solve(X, Y, lam):
    """argmin_B ||X B - Y||_F^2 + lam ||B||_F^2 via the normal equations.

    Solved through a Cholesky factorization of X'X + lam I; when lam = 0
    and X'X is singular the minimum-norm solution pinv(X) Y is returned
    instead.
    """
    X = as_dense(X)
    Y = as_dense(Y)
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"row mismatch: X {X.shape} vs Y {Y.shape}")
    if X.shape[0] == 0:
        raise ParameterError("ridge_solve on empty input")
    if lam < 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    G = X.T @ X
    if lam > 0:
        G = G + lam * np.eye(X.shape[1])
    rhs = X.T @ Y
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        return pinv(X) @ Y
    z = scipy.linalg.solve_triangular(L, rhs, lower=True)
    # canonical C order so persisted models reproduce products bitwise
    return np.ascontiguousarray(scipy.linalg.solve_triangular(L.T, z, lower=False))


def spectral_radius_estimate(W, max_iters=1000, tol=1e-4):
    """Largest eigenvalue magnitude via the Gelfand power estimate.

    Iterates x <- W x with renormalization every step and estimates
    rho = exp(mean of the last k/2 log growth ratios); the windowed
    geometric mean suppresses both polynomial transients and the
    oscillation of complex-pair dominated iterates. Returns 0 for
    nilpotent or zero matrices. Deterministic: the probe vector comes
    from a fixed internal seed.
    """
    W = as_dense(W)
    n, m = W.shape
    if n != m:
        raise ShapeError(f"spectral radius needs a square matrix, got {W.shape}")
    if n == 0:
        raise ShapeError("spectral radius of empty matrix")
    gen = np.random.Generator(np.random.PCG64(0x5EED_0F_0DD5))
    x = gen.standard_normal(n)
    x /= np.linalg.norm(x)
    log_ratios = np.empty(max_iters)
    estimate = 0.0
    for it in range(max_iters):
        x = W @ x
        norm = np.linalg.norm(x)
        if norm == 0.0 or not np.isfinite(norm):
            # nilpotent collapse (or overflow of a huge radius): the
            # windowed mean so far is the best available answer
            return 0.0 if norm == 0.0 else float(np.exp(np.mean(log_ratios[: it or 1])))
        log_ratios[it] = np.log(norm)
        x /= norm
        k = it + 1
        if k >= 64 and k % 16 == 0:
            new = float(np.exp(np.mean(log_ratios[k // 2 : k])))
            if estimate > 0.0 and abs(new - estimate) <= tol * max(new, 1e-300):
                return new
            estimate = new
    k = max_iters
    return float(np.exp(np.mean(log_ratios[k // 2 : k])))
