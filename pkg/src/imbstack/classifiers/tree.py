"""Binary decision trees on numeric features.

Trees are grown from presorted columns: the root argsorts every feature
once and each child inherits its parent's orderings by stable filtering,
so no node sorts again. Classification trees split on weighted
information gain, the gradient-boosting regressor on squared error and
boosting stumps on weighted misclassification. Trees are stored as flat
arrays and evaluated vectorised.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            n = node[active]
            go_left = X[active, self.feature[n]] <= self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


def _entropy(p):
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        return -(np.where(p > 0, p * np.log2(p), 0.0) + np.where(q > 0, q * np.log2(q), 0.0))


def _midpoint(a, b):
    t = a + (b - a) / 2.0
    return a if t >= b else t


def presort(X: np.ndarray) -> np.ndarray:
    """Row indices sorted by each feature, shape (d, n): one row per feature."""
    return np.argsort(X.T, axis=1, kind="stable")


def restrict(orders: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Keep only rows where ``mask`` is set, preserving each feature's order."""
    sel = mask[orders]
    return orders[sel].reshape(orders.shape[0], -1)


def sorted_values(X: np.ndarray, orders: np.ndarray) -> np.ndarray:
    return X.T[np.arange(X.shape[1])[:, None], orders]


def _valid_cuts(xs, min_leaf):
    """Boolean (d, n-1): may we cut between sorted positions i and i+1?"""
    n = xs.shape[1]
    valid = xs[:, :-1] < xs[:, 1:]
    if min_leaf > 1:
        valid[:, : min_leaf - 1] = False
        valid[:, n - min_leaf:] = False
    return valid


def _pick(score, valid, xs, floor):
    """Best (feature row, threshold) from a (d, n-1) table of split scores.

    Ties go to the lowest feature, then the lowest cut position.
    """
    score = np.where(valid & np.isfinite(score), score, -np.inf)
    j, i = divmod(int(np.argmax(score)), score.shape[1])
    if not score[j, i] > floor:
        return -1, 0.0
    return j, _midpoint(xs[j, i], xs[j, i + 1])


def entropy_split(xs, ws, wys, min_leaf=1):
    """Information-gain split over presorted features.

    ``xs``, ``ws`` and ``wys`` are (d, n): feature values, weights and
    weight * label, each row sorted by its feature. Returns
    ``(feature row, threshold)``, or ``(-1, 0.0)`` if no cut gains
    information.
    """
    if xs.shape[1] < 2:
        return -1, 0.0
    valid = _valid_cuts(xs, min_leaf)
    if not valid.any():
        return -1, 0.0
    W = ws[0].sum()
    W1 = wys[0].sum()
    cw = np.cumsum(ws, axis=1)[:, :-1]
    cw1 = np.cumsum(wys, axis=1)[:, :-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        hl = _entropy(cw1 / cw)
        hr = _entropy((W1 - cw1) / (W - cw))
    gain = _entropy(W1 / W) - (cw * hl + (W - cw) * hr) / W
    return _pick(gain, valid, xs, _MIN_GAIN)


def variance_split(xs, rs, min_leaf=1):
    """Squared-error split of presorted residual rows ``rs`` (d, n)."""
    n = xs.shape[1]
    if n < 2:
        return -1, 0.0
    valid = _valid_cuts(xs, min_leaf)
    if not valid.any():
        return -1, 0.0
    total = rs[0].sum()
    base = total * total / n
    counts = np.arange(1, n, dtype=float)
    cs = np.cumsum(rs, axis=1)[:, :-1]
    score = cs * cs / counts + (total - cs) ** 2 / (n - counts) - base
    return _pick(score, valid, xs, _MIN_GAIN * max(1.0, abs(base)))


def _grow(X, orders, choose, leaf_value) -> Tree:
    """Depth-first growth; ``choose(rows, orders, depth)`` returns a split."""
    n, d = X.shape
    feature, threshold, left, right, value = [], [], [], [], []
    flag = np.zeros(n, dtype=bool)

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    stack = [(new_node(), orders, 0)]
    while stack:
        node, ords, depth = stack.pop()
        rows = ords[0]
        value[node] = leaf_value(rows)
        f, thr = choose(rows, ords, depth)
        if f < 0:
            continue
        flag[rows] = X[rows, f] <= thr
        sel = flag[ords]
        flag[rows] = False
        left_ords = ords[sel].reshape(d, -1)
        right_ords = ords[~sel].reshape(d, -1)
        li, ri = new_node(), new_node()
        feature[node], threshold[node], left[node], right[node] = f, thr, li, ri
        stack.append((ri, right_ords, depth + 1))
        stack.append((li, left_ords, depth + 1))

    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=float),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=float),
    )


def grow_classification_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: Optional[np.ndarray] = None,
    max_depth: Optional[int] = 12,
    min_leaf: int = 5,
    max_features: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    laplace: bool = True,
    orders: Optional[np.ndarray] = None,
) -> Tree:
    """Grow an information-gain tree; leaf value is the (weighted) P(y=1).

    With ``laplace`` the leaf estimate is ``(W1 + 1) / (W + 2)`` on weighted
    counts, otherwise the raw weighted frequency. ``max_features`` draws a
    fresh feature subset at every node (random-forest style) from ``rng``.
    ``orders`` (from ``presort``, possibly ``restrict``-ed) limits growth to
    a subset of the rows of ``X``.
    """
    y = np.asarray(y, dtype=float)
    w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    wy = w * y
    d = X.shape[1]

    def leaf_value(rows):
        W = w[rows].sum()
        W1 = wy[rows].sum()
        if laplace:
            return (W1 + 1.0) / (W + 2.0)
        return W1 / W if W > 0 else 0.5

    def choose(rows, ords, depth):
        if (max_depth is not None and depth >= max_depth) or len(rows) < 2 * min_leaf:
            return -1, 0.0
        yr = y[rows]
        if yr.min() == yr.max():
            return -1, 0.0
        feats = np.arange(d)
        if max_features is not None and max_features < d:
            feats = np.sort(rng.choice(d, size=max_features, replace=False))
        sub = ords[feats]
        j, thr = entropy_split(X.T[feats[:, None], sub], w[sub], wy[sub], min_leaf)
        return (-1, 0.0) if j < 0 else (int(feats[j]), thr)

    return _grow(X, presort(X) if orders is None else orders, choose, leaf_value)


def grow_regression_tree(
    X: np.ndarray,
    residual: np.ndarray,
    max_depth: int = 3,
    min_leaf: int = 5,
    orders: Optional[np.ndarray] = None,
) -> Tree:
    """Least-squares tree on ``residual``; leaf values are left at zero.

    Callers (gradient boosting) fill leaf values themselves from the leaf
    membership returned by ``apply``.
    """
    r = np.asarray(residual, dtype=float)
    feats = np.arange(X.shape[1])[:, None]

    def choose(rows, ords, depth):
        if depth >= max_depth or len(rows) < 2 * min_leaf:
            return -1, 0.0
        return variance_split(X.T[feats, ords], r[ords], min_leaf)

    return _grow(X, presort(X) if orders is None else orders, choose, lambda rows: 0.0)


class StumpSearch:
    """Stump fitting against a fixed design matrix.

    Sorted feature values and admissible cuts are computed once; each
    ``fit`` then costs two cumulative sums. Rows absent from ``orders``
    must carry zero weight.
    """

    def __init__(self, X: np.ndarray, orders: Optional[np.ndarray] = None):
        self.X = X
        self.orders = presort(X) if orders is None else orders
        self.xs = sorted_values(X, self.orders)
        self.valid = _valid_cuts(self.xs, 1) if self.xs.shape[1] > 1 else None

    def fit(self, y: np.ndarray, w: np.ndarray) -> Tree:
        """Depth-1 tree minimising weighted misclassification.

        Leaves hold the weighted minority frequency on their side of the cut.
        """
        y = np.asarray(y, dtype=float)
        wy = w * y
        W = w.sum()
        W1 = wy.sum()
        j = -1
        if self.valid is not None and self.valid.any():
            cw = np.cumsum(w[self.orders], axis=1)[:, :-1]
            cw1 = np.cumsum(wy[self.orders], axis=1)[:, :-1]
            err = np.minimum(cw1, cw - cw1) + np.minimum(W1 - cw1, (W - cw) - (W1 - cw1))
            # score: reduction in weighted error relative to a constant guess
            j, thr = _pick(min(W1, W - W1) - err, self.valid, self.xs, -np.inf)

        root = W1 / W if W > 0 else 0.5
        if j < 0:
            return Tree(np.array([-1]), np.zeros(1), np.array([-1]), np.array([-1]), np.array([root]))
        go_left = self.X[:, j] <= thr
        Wl = w[go_left].sum()
        W1l = wy[go_left].sum()
        left = W1l / Wl if Wl > 0 else 0.5
        right = (W1 - W1l) / (W - Wl) if W - Wl > 0 else 0.5
        return Tree(
            np.array([j, -1, -1]),
            np.array([thr, 0.0, 0.0]),
            np.array([1, -1, -1]),
            np.array([2, -1, -1]),
            np.array([root, left, right]),
        )


def fit_stump(X, y, w, orders=None) -> Tree:
    return StumpSearch(X, orders).fit(y, np.asarray(w, dtype=float))
