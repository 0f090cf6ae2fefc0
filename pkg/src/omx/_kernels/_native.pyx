# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled tree hot kernels.

Mirrors omx._kernels._fallback: identical split choice and routing on
identical input, so builds with and without the extension agree.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport free, malloc

cnp.import_array()

IMPL = "native"


def best_split(cnp.ndarray[cnp.float64_t, ndim=2] X,
               cnp.ndarray[cnp.float64_t, ndim=2] Y,
               cnp.ndarray[cnp.int64_t, ndim=1] idx,
               cnp.ndarray[cnp.int64_t, ndim=1] features,
               long min_samples_leaf):
    cdef long n = idx.shape[0]
    cdef long q = Y.shape[1]
    cdef long nf = features.shape[0]
    if n < 2:
        return -1, 0.0, 0.0

    cdef cnp.ndarray[cnp.float64_t, ndim=2] Ysub = np.ascontiguousarray(Y[idx])
    cdef double[:, ::1] ys = Ysub
    cdef double[:, ::1] xv = X
    cdef long[::1] iv = idx
    cdef long[::1] fv = features

    cdef double *total = <double *> malloc(q * sizeof(double))
    cdef double *left_sum = <double *> malloc(q * sizeof(double))
    cdef double *gains = <double *> malloc(n * sizeof(double))
    if total == NULL or left_sum == NULL or gains == NULL:
        free(total); free(left_sum); free(gains)
        raise MemoryError()

    cdef long i, j, f, fi, pos
    cdef double total_sq = 0.0, fit_all, parent_sse
    cdef double v
    for j in range(q):
        total[j] = 0.0
    for i in range(n):
        for j in range(q):
            v = ys[i, j]
            total[j] += v
            total_sq += v * v
    fit_all = 0.0
    for j in range(q):
        fit_all += total[j] * total[j]
    fit_all /= n
    parent_sse = total_sq - fit_all

    cdef long best_feature = -1
    cdef double best_threshold = 0.0
    cdef double best_gain = 0.0
    cdef double gain, left_fit, right_fit, s, feat_best_gain, eps
    cdef long feat_best_pos
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order_arr
    cdef long[::1] ov
    cdef cnp.ndarray[cnp.float64_t, ndim=1] col_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] cv = col_arr

    for fi in range(nf):
        f = fv[fi]
        for i in range(n):
            cv[i] = xv[iv[i], f]
        order_arr = np.argsort(col_arr, kind="stable")
        ov = order_arr
        for j in range(q):
            left_sum[j] = 0.0
        feat_best_gain = -1e308
        feat_best_pos = -1
        with nogil:
            for i in range(n - 1):
                gains[i] = -1e308
                for j in range(q):
                    left_sum[j] += ys[ov[i], j]
                pos = i + 1
                if cv[ov[i]] == cv[ov[i + 1]]:
                    continue
                if pos < min_samples_leaf or n - pos < min_samples_leaf:
                    continue
                left_fit = 0.0
                right_fit = 0.0
                for j in range(q):
                    s = left_sum[j]
                    left_fit += s * s
                    s = total[j] - s
                    right_fit += s * s
                gain = left_fit / pos + right_fit / (n - pos) - fit_all
                gains[i] = gain
                if gain > feat_best_gain:
                    feat_best_gain = gain
            if feat_best_gain > -1e308:
                # lowest threshold among candidates tied (to 1e-12) with the max
                eps = 1e-12 * (fabs(feat_best_gain) if fabs(feat_best_gain) > 1.0 else 1.0)
                for i in range(n - 1):
                    if gains[i] >= feat_best_gain - eps:
                        feat_best_pos = i
                        break
        if feat_best_pos >= 0:
            gain = feat_best_gain
            if gain > best_gain + 1e-12 * max(1.0, fabs(best_gain)):
                best_feature = f
                best_threshold = 0.5 * (cv[ov[feat_best_pos]] + cv[ov[feat_best_pos + 1]])
                best_gain = gain

    free(total); free(left_sum); free(gains)
    if best_feature < 0 or best_gain <= 0.0:
        return -1, 0.0, 0.0
    return int(best_feature), float(best_threshold), float(best_gain)


def tree_apply(cnp.ndarray[cnp.int64_t, ndim=1] feature,
               cnp.ndarray[cnp.float64_t, ndim=1] threshold,
               cnp.ndarray[cnp.int64_t, ndim=1] left,
               cnp.ndarray[cnp.int64_t, ndim=1] right,
               cnp.ndarray[cnp.int64_t, ndim=1] leaf_id,
               cnp.ndarray[cnp.float64_t, ndim=2] X):
    cdef long n = X.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef long[::1] fv = feature
    cdef double[::1] tv = threshold
    cdef long[::1] lv = left
    cdef long[::1] rv = right
    cdef long[::1] leafv = leaf_id
    cdef double[:, ::1] xv = np.ascontiguousarray(X)
    cdef long[::1] ov = out
    cdef long i, node
    with nogil:
        for i in range(n):
            node = 0
            while fv[node] >= 0:
                if xv[i, fv[node]] <= tv[node]:
                    node = lv[node]
                else:
                    node = rv[node]
            ov[i] = leafv[node]
    return out
