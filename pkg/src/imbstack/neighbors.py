"""Distance metrics and an exact k-nearest-neighbor index.

Neighbor lists are ordered by (distance, point index), so every consumer
(the SMOTE family, cleaning rules, the KNN classifier) is bit-deterministic.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigError, DataError

METRICS = ("euclidean", "manhattan", "chebyshev", "cosine")
_MINKOWSKI_P = {"euclidean": 2.0, "manhattan": 1.0, "chebyshev": np.inf}
# bound on the broadcast difference block, in doubles
_BLOCK = 4_000_000
# below this many points the tree is not worth building
_TREE_MIN_POINTS = 512
# candidate lists longer than this fall back to the exhaustive scan
_TREE_MAX_CANDIDATES = 1024


def check_metric(metric: str) -> str:
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}; expected one of {METRICS}")
    return metric


def _paired(A: np.ndarray, B: np.ndarray, metric: str) -> np.ndarray:
    """Distances between broadcast rows of A and B (reduces the last axis).

    Every distance in the package goes through this one kernel, so the same
    pair of points always yields the same float.
    """
    if metric == "cosine":
        dot = (A * B).sum(axis=-1)
        na = np.sqrt((A * A).sum(axis=-1))
        nb = np.sqrt((B * B).sum(axis=-1))
        return np.clip(1.0 - dot / (na * nb), 0.0, 2.0)
    diff = np.abs(A - B)
    if metric == "euclidean":
        return np.sqrt((diff * diff).sum(axis=-1))
    if metric == "manhattan":
        return diff.sum(axis=-1)
    return diff.max(axis=-1)


def _check_pair(A, B, metric):
    check_metric(metric)
    if A.shape[1] != B.shape[1]:
        raise DataError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if metric == "cosine" and not (np.any(A != 0, axis=1).all() and np.any(B != 0, axis=1).all()):
        raise DataError("cosine distance is undefined for a zero vector")


def pairwise_distances(A, B, metric: str = "euclidean") -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    _check_pair(A, B, metric)
    return _pairwise(A, B, metric)


def _pairwise(A, B, metric):
    out = np.empty((A.shape[0], B.shape[0]))
    step = max(1, _BLOCK // max(1, B.size))
    for s in range(0, A.shape[0], step):
        out[s:s + step] = _paired(A[s:s + step, None, :], B[None, :, :], metric)
    return out


def distance(metric: str, a, b) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise DataError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    if metric == "cosine" and not (a.any() or b.any()):
        raise DataError("cosine distance is undefined for zero vectors")
    return float(pairwise_distances(a[None], b[None], metric)[0, 0])


def _select_k(D: np.ndarray, k: int):
    """Indices and distances of the k smallest entries per row, ties by index."""
    nq = D.shape[0]
    part = np.argpartition(D, k - 1, axis=1)[:, :k]
    kth = np.take_along_axis(D, part, axis=1).max(axis=1)
    rows, cols = np.nonzero(D <= kth[:, None])
    dist = D[rows, cols]
    order = np.lexsort((cols, dist, rows))
    counts = np.bincount(rows, minlength=nq)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    take = order[(starts[:, None] + np.arange(k)).ravel()]
    return cols[take].reshape(nq, k), dist[take].reshape(nq, k)


def kneighbors(
    points,
    queries,
    k: int,
    metric: str = "euclidean",
    exclude: Optional[np.ndarray] = None,
):
    """Batched exact k-NN of ``queries`` among ``points``.

    ``exclude[i]`` (if given, -1 for none) is a point index that query ``i``
    may not return; used for self-exclusion.
    Returns ``(indices, distances)``, both of shape ``(len(queries), k)``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    m = points.shape[0]
    available = m - (0 if exclude is None else 1)
    if not 1 <= k <= available:
        raise ConfigError(f"k={k} outside [1, {available}] available points")
    _check_pair(queries, points, metric)
    exclude = None if exclude is None else np.asarray(exclude, dtype=np.int64)
    if metric != "cosine" and m >= _TREE_MIN_POINTS:
        return _tree_kneighbors(points, queries, k, metric, exclude)
    return _brute_kneighbors(points, queries, k, metric, exclude)


def _brute_kneighbors(points, queries, k, metric, exclude):
    nq = queries.shape[0]
    idx = np.empty((nq, k), dtype=np.int64)
    dst = np.empty((nq, k), dtype=float)
    step = max(1, _BLOCK // max(1, points.size))
    for s in range(0, nq, step):
        e = min(nq, s + step)
        D = _pairwise(queries[s:e], points, metric)
        if exclude is not None:
            ex = exclude[s:e]
            hit = ex >= 0
            D[np.flatnonzero(hit), ex[hit]] = np.inf
        idx[s:e], dst[s:e] = _select_k(D, k)
    return idx, dst


def _tree_kneighbors(points, queries, k, metric, exclude):
    """Exact k-NN using a KD-tree only to shortlist candidates.

    Candidate distances are recomputed with the shared kernel and re-ranked
    by (distance, index). A query is accepted only when every point outside
    the shortlist is provably farther than its k-th neighbor; otherwise the
    shortlist grows, and past a cap the query is scanned exhaustively. The
    result is identical to the exhaustive scan.
    """
    m = points.shape[0]
    p = _MINKOWSKI_P[metric]
    tree = cKDTree(points)
    nq = queries.shape[0]
    idx = np.empty((nq, k), dtype=np.int64)
    dst = np.empty((nq, k), dtype=float)
    pending = np.arange(nq)
    kq = k + 2
    while pending.size:
        if kq >= m or kq > _TREE_MAX_CANDIDATES:
            ex = None if exclude is None else exclude[pending]
            idx[pending], dst[pending] = _brute_kneighbors(points, queries[pending], k, metric, ex)
            break
        kd, cand = tree.query(queries[pending], k=kq, p=p)
        exact = _paired(queries[pending][:, None, :], points[cand], metric)
        if exclude is not None:
            exact[cand == exclude[pending][:, None]] = np.inf
        order = np.lexsort((cand, exact), axis=1)[:, :k]
        top_d = np.take_along_axis(exact, order, axis=1)
        kth = top_d[:, -1]
        ok = kd[:, -1] > kth * (1.0 + 1e-9) + 1e-300
        done = pending[ok]
        idx[done] = np.take_along_axis(cand, order, axis=1)[ok]
        dst[done] = top_d[ok]
        pending = pending[~ok]
        kq *= 4
    return idx, dst


class NeighborIndex:
    """Immutable brute-force index over a point set, optionally labelled."""

    def __init__(self, points, metric: str = "euclidean", labels=None):
        self.points = np.array(points, dtype=float, copy=True)
        if self.points.ndim != 2:
            raise DataError("points must be a 2-D array")
        self.points.setflags(write=False)
        self.metric = check_metric(metric)
        self.labels = None
        if labels is not None:
            self.labels = np.array(labels, copy=True)
            if self.labels.shape != (len(self.points),):
                raise DataError("labels length does not match points")
            self.labels.setflags(write=False)

    def __len__(self):
        return self.points.shape[0]

    def query(self, query, k: int, exclude_self: bool = False):
        """k nearest points as ``[(index, distance), ...]`` ascending.

        With ``exclude_self`` the query must be a member index (int); the
        member itself is then never returned.
        """
        if exclude_self:
            if not isinstance(query, (int, np.integer)):
                raise ConfigError("exclude_self needs the query given as a member index")
            q = self.points[int(query)][None]
            exclude = np.array([int(query)])
        else:
            q = self.points[int(query)][None] if isinstance(query, (int, np.integer)) else query
            exclude = None
        q = np.atleast_2d(np.asarray(q, dtype=float))
        if q.shape[1] != self.points.shape[1]:
            raise DataError(f"dimension mismatch: {q.shape[1]} vs {self.points.shape[1]}")
        idx, dst = kneighbors(self.points, q, k, self.metric, exclude)
        return [(int(i), float(d)) for i, d in zip(idx[0], dst[0])]


def knn_query(index: NeighborIndex, query, k: int, exclude_self: bool = False):
    return index.query(query, k, exclude_self)


def knn_vote(index: NeighborIndex, query, k: int):
    """Majority label among the k nearest points and its vote fraction."""
    if k % 2 == 0:
        raise ConfigError(f"k must be odd so the vote always has a winner, got {k}")
    if index.labels is None:
        raise ConfigError("knn_vote needs a labelled index")
    hits = index.query(query, k)
    votes = int(sum(index.labels[i] for i, _ in hits))
    winner = 1 if 2 * votes > k else 0
    won = votes if winner == 1 else k - votes
    return winner, won / k
