"""Pure-numpy tree kernels.

Reference implementation of the routines in ``_tree_ext.pyx``. Both follow the
same arithmetic order so they produce bit-identical trees; the compiled one is
preferred when importable.

A tree is grown from per-row sufficient statistics ``a`` and ``b``:

* ``VARIANCE`` (forest): ``a = w*y``, ``b = w``; leaf value ``A/B`` and split
  score ``aL^2/bL + aR^2/bR - A^2/B`` (weighted variance reduction).
* ``NEWTON`` (boosting): ``a = grad``, ``b = hess``; leaf value ``-A/(B+lam)``
  and gain ``0.5*(aL^2/(bL+lam) + aR^2/(bR+lam) - A^2/(B+lam)) - gamma``.
"""
import numpy as np

VARIANCE = 0
NEWTON = 1

# relative floor on variance-reduction; suppresses splits that only shuffle rounding noise
_MIN_REL_IMPROVEMENT = 1e-12


def restrict_order(sorted_rows, features, include):
    """Presorted row lists of ``features`` keeping only rows flagged in ``include``."""
    sub = sorted_rows[features]
    keep = include[sub]
    return np.ascontiguousarray(sub[keep].reshape(len(features), int(include.sum())))


def grow_tree(X, sorted_rows, features, include, a, b, criterion, max_depth,
              min_samples_split, min_samples_leaf, min_child_weight, reg_lambda, gamma):
    """Grow one regression tree depth-first.

    ``sorted_rows[f]`` lists every row stably sorted by feature ``f``; only rows
    with ``include`` set take part, and only the (ascending) ``features`` are
    split candidates.

    Returns ``(feature, threshold, left, right, value)`` node arrays in
    preorder; leaves have ``feature == -1``.
    """
    features = np.asarray(features, dtype=np.intp)
    order = restrict_order(sorted_rows, features, np.asarray(include, dtype=bool))
    k, m = order.shape
    feat, thr, left, right, value = [], [], [], [], []
    mark = np.zeros(X.shape[0], dtype=bool)

    def leaf_value(A, B):
        if criterion == VARIANCE:
            return A / B
        denom = B + reg_lambda
        return -A / denom if denom > 0 else 0.0

    def best_split(start, end):
        best_score, best_j, best_thr = -np.inf, -1, 0.0
        n = end - start
        for j in range(k):
            rows = order[j, start:end]
            xs = X[rows, features[j]]
            ca = np.cumsum(a[rows])
            cb = np.cumsum(b[rows])
            A = ca[-1]
            B = cb[-1]
            aL = ca[:-1]
            bL = cb[:-1]
            aR = A - aL
            bR = B - bL
            nL = np.arange(1, n)
            ok = xs[:-1] < xs[1:]
            with np.errstate(divide="ignore", invalid="ignore"):
                if criterion == VARIANCE:
                    ok &= (nL >= min_samples_leaf) & (n - nL >= min_samples_leaf)
                    ok &= (bL > 0) & (bR > 0)
                    score = aL * aL / bL + aR * aR / bR - A * A / B
                else:
                    ok &= (bL >= min_child_weight) & (bR >= min_child_weight)
                    ok &= (bL + reg_lambda > 0) & (bR + reg_lambda > 0)
                    score = 0.5 * (aL * aL / (bL + reg_lambda) + aR * aR / (bR + reg_lambda)
                                   - A * A / (B + reg_lambda)) - gamma
            if not ok.any():
                continue
            score = np.where(ok, score, -np.inf)
            i = int(np.argmax(score))
            if score[i] > best_score:
                best_score = score[i]
                best_j = j
                t = (xs[i] + xs[i + 1]) / 2.0
                if t >= xs[i + 1]:
                    t = xs[i]
                best_thr = t
        return best_score, best_j, best_thr

    def build(start, end, depth):
        node = len(feat)
        feat.append(-1)
        thr.append(0.0)
        left.append(-1)
        right.append(-1)
        rows0 = order[0, start:end]
        A = np.cumsum(a[rows0])[-1]
        B = np.cumsum(b[rows0])[-1]
        value.append(leaf_value(A, B))
        n = end - start
        if depth >= max_depth or n < min_samples_split or n < 2:
            return node
        score, j, t = best_split(start, end)
        if j < 0:
            return node
        if criterion == VARIANCE:
            if not score > _MIN_REL_IMPROVEMENT * abs(A * A / B):
                return node
        elif not score > 0:
            return node
        f = features[j]
        mark[rows0] = X[rows0, f] <= t
        n_left = int(mark[rows0].sum())
        for jj in range(k):
            seg = order[jj, start:end]
            go = mark[seg]
            order[jj, start:end] = np.concatenate((seg[go], seg[~go]))
        feat[node] = int(f)
        thr[node] = float(t)
        left[node] = build(start, start + n_left, depth + 1)
        right[node] = build(start + n_left, end, depth + 1)
        return node

    if m == 0:
        raise ValueError("cannot grow a tree on zero rows")
    build(0, m, 0)
    return (np.asarray(feat, dtype=np.intp), np.asarray(thr, dtype=np.float64),
            np.asarray(left, dtype=np.intp), np.asarray(right, dtype=np.intp),
            np.asarray(value, dtype=np.float64))


def apply_tree(X, feature, threshold, left, right):
    """Return the leaf node id reached by every row of ``X``."""
    node = np.zeros(X.shape[0], dtype=np.intp)
    active = feature[node] >= 0
    while active.any():
        idx = np.nonzero(active)[0]
        cur = node[idx]
        go_left = X[idx, feature[cur]] <= threshold[cur]
        node[idx] = np.where(go_left, left[cur], right[cur])
        active[idx] = feature[node[idx]] >= 0
    return node
