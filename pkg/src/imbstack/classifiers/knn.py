import numpy as np

from ..neighbors import kneighbors


class KNNClassifier:
    """Score is the fraction of the k nearest training rows that are minority."""

    def __init__(self, k=5, metric="euclidean"):
        self.k = k
        self.metric = metric
        self.warnings_ = []

    def fit(self, X, y, seed=None):
        self.X_ = np.asarray(X, dtype=float)
        self.y_ = np.asarray(y, dtype=np.int64)
        self.k_ = self.k
        if self.k > len(self.y_):
            self.k_ = len(self.y_)
            self.warnings_.append(f"k={self.k} exceeds {len(self.y_)} training rows; using k={self.k_}")
        return self

    def neighbors(self, X):
        idx, _ = kneighbors(self.X_, X, self.k_, self.metric)
        return idx

    def predict_proba(self, X):
        return self.y_[self.neighbors(X)].sum(axis=1) / self.k_
