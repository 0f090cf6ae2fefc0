"""Pure-numpy implementations of the tree hot kernels.

Semantics must match omx._kernels._native exactly: the same split is
chosen on the same input (gains are accumulated left-to-right in both),
so a build without the compiled extension produces identical trees.
"""

import numpy as np

IMPL = "fallback"


def best_split(X, Y, idx, features, min_samples_leaf):
    """Best (feature, threshold) split of the sample set `idx`.

    Impurity is total squared error summed over output columns; the
    returned gain is the parent SSE minus the best split SSE. Candidate
    thresholds are midpoints between adjacent distinct sorted values.
    Ties break on lower feature index, then lower threshold.

    Returns (feature, threshold, gain); feature is -1 when no split
    with positive gain exists.
    """
    n = idx.shape[0]
    q = Y.shape[1]
    Ysub = Y[idx]
    # accumulation order mirrors the compiled kernel exactly (running
    # per-column sums, then a sequential sweep over output columns) so
    # both implementations produce bitwise-equal gains
    total = np.cumsum(Ysub, axis=0)[-1] if n else np.zeros(q)
    fit_all = 0.0
    for t in total:
        fit_all += t * t
    fit_all /= n

    best_feature = -1
    best_threshold = 0.0
    best_gain = 0.0
    for f in features:
        col = X[idx, f]
        order = np.argsort(col, kind="stable")
        v = col[order]
        Ys = Ysub[order]
        csum = np.cumsum(Ys, axis=0)
        # split after position i: left = first i+1 samples
        pos = np.arange(1, n)
        valid = v[1:] != v[:-1]
        if min_samples_leaf > 1:
            valid &= (pos >= min_samples_leaf) & (n - pos >= min_samples_leaf)
        if not valid.any():
            continue
        left_n = pos[valid]
        left_sum = csum[:-1][valid]
        left_fit = np.zeros(left_n.shape[0])
        right_fit = np.zeros(left_n.shape[0])
        for j in range(q):
            s = left_sum[:, j]
            left_fit += s * s
            s = total[j] - s
            right_fit += s * s
        gain = left_fit / left_n + right_fit / (n - left_n) - fit_all
        top = float(gain[np.argmax(gain)])
        # lowest threshold among candidates tied (to 1e-12) with the max
        j = int(np.argmax(gain >= top - 1e-12 * max(1.0, abs(top))))
        if gain[j] > best_gain + 1e-12 * max(1.0, abs(best_gain)):
            i = left_n[j] - 1
            thr = 0.5 * (v[i] + v[i + 1])
            best_feature = int(f)
            best_threshold = float(thr)
            best_gain = float(gain[j])
    if best_feature < 0 or best_gain <= 0.0:
        return -1, 0.0, 0.0
    return best_feature, best_threshold, best_gain


def tree_apply(feature, threshold, left, right, leaf_id, X):
    """Route every row of X to a leaf; returns per-row leaf ids.

    Node arrays are parallel: internal nodes have feature >= 0 and
    child indices; leaves have feature == -1 and a leaf_id >= 0.
    """
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    active = feature[node] >= 0
    while active.any():
        rows = np.where(active)[0]
        cur = node[rows]
        go_left = X[rows, feature[cur]] <= threshold[cur]
        node[rows] = np.where(go_left, left[cur], right[cur])
        active[rows] = feature[node[rows]] >= 0
    return leaf_id[node]
