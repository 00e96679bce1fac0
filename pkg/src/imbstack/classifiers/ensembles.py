"""Tree learners and ensembles: C4.5-style tree, cost-sensitive forest,
bagging, discrete AdaBoost, RUSBoost, EasyEnsemble and gradient boosting."""
import math

import numpy as np

from ..seeding import rng as make_rng
from .tree import StumpSearch, grow_classification_tree, grow_regression_tree, presort, restrict


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def _bootstrap_weights(n, gen):
    """Bootstrap sample of size n expressed as per-row multiplicities."""
    return np.bincount(gen.integers(0, n, size=n), minlength=n).astype(float)


class C45Tree:
    """Single entropy tree, no pruning, Laplace-smoothed leaves."""

    def __init__(self, max_depth=12, min_leaf=5):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.warnings_ = []

    def fit(self, X, y, seed=None):
        self.tree_ = grow_classification_tree(X, y, None, self.max_depth, self.min_leaf)
        return self

    def predict_proba(self, X):
        return self.tree_.predict(X)


class CostSensitiveForest:
    """Random forest whose impurity and leaf estimates weight each class.

    Only the ratio ``w_minority / w_majority`` reaches the trees, so scaling
    both weights by the same constant cannot change any prediction.
    """

    def __init__(self, n_trees=100, max_depth=12, min_leaf=5, w_majority=1.0, w_minority=None):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.w_majority = w_majority
        self.w_minority = w_minority
        self.warnings_ = []

    def fit(self, X, y, seed=0):
        gen = make_rng(seed)
        y = np.asarray(y)
        n, d = X.shape
        w_min = self.w_minority
        if w_min is None:
            w_min = (y == 0).sum() / (y == 1).sum()
        self.cost_weights_ = (float(self.w_majority), float(w_min))
        ratio = self.cost_weights_[1] / self.cost_weights_[0]
        class_w = np.where(y == 1, ratio, 1.0)
        max_features = max(1, int(math.sqrt(d)))
        orders = presort(X)
        self.trees_ = []
        for _ in range(self.n_trees):
            mult = _bootstrap_weights(n, gen)
            tree = grow_classification_tree(
                X, y, mult * class_w, self.max_depth, self.min_leaf, max_features, gen,
                orders=restrict(orders, mult > 0),
            )
            self.trees_.append(tree)
        return self

    def predict_proba(self, X):
        return np.mean([t.predict(X) for t in self.trees_], axis=0)


class Bagging:
    """Bootstrap-aggregated entropy trees; score is the mean member score."""

    def __init__(self, n_trees=50, max_depth=None, min_leaf=5):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.warnings_ = []

    def fit(self, X, y, seed=0):
        gen = make_rng(seed)
        y = np.asarray(y)
        orders = presort(X)
        self.trees_ = []
        for _ in range(self.n_trees):
            mult = _bootstrap_weights(len(y), gen)
            self.trees_.append(grow_classification_tree(
                X, y, mult, self.max_depth, self.min_leaf, orders=restrict(orders, mult > 0),
            ))
        return self

    def member_scores(self, X):
        return np.array([t.predict(X) for t in self.trees_])

    def predict_proba(self, X):
        return self.member_scores(X).mean(axis=0)


class AdaBoost:
    """Discrete AdaBoost over decision stumps.

    A round is accepted only if its weighted training error is below 0.5;
    the first round that fails stops boosting. The score is
    ``sigmoid(sum(alpha_t * h_t) / sum(alpha_t))`` with ``h_t`` in {-1, +1}.

    With ``undersample`` every round fits its stump on all minority rows plus
    a fresh random majority sample of equal size (RUSBoost); errors and
    weight updates still use the whole training set.
    """

    def __init__(self, n_rounds=100, undersample=False):
        self.n_rounds = n_rounds
        self.undersample = undersample
        self.warnings_ = []

    def fit(self, X, y, seed=0):
        gen = make_rng(seed)
        y = np.asarray(y)
        s = np.where(y == 1, 1.0, -1.0)
        n = len(y)
        w = np.full(n, 1.0 / n)
        minority = np.flatnonzero(y == 1)
        majority = np.flatnonzero(y == 0)
        orders = presort(X)
        search = StumpSearch(X, orders)
        self.stumps_, self.alphas_, self.errors_ = [], [], []
        self.stop_reason_ = "max_rounds"
        for _ in range(self.n_rounds):
            if self.undersample:
                take = min(len(majority), len(minority))
                mask = np.zeros(n, dtype=bool)
                mask[minority] = True
                mask[gen.choice(majority, take, replace=False)] = True
                w_sub = np.where(mask, w, 0.0)
                stump = StumpSearch(X, restrict(orders, mask)).fit(y, w_sub / w_sub.sum())
            else:
                stump = search.fit(y, w)
            h = np.where(stump.predict(X) >= 0.5, 1.0, -1.0)
            err = float(w[h != s].sum() / w.sum())
            # a coin-flip stump can land a rounding error under 0.5
            if err >= 0.5 - 1e-12:
                self.stop_reason_ = f"weak learner error {err:.4f} >= 0.5"
                break
            alpha = 0.5 * math.log((1.0 - err) / max(err, 1e-10))
            self.stumps_.append(stump)
            self.alphas_.append(alpha)
            self.errors_.append(err)
            w = w * np.exp(-alpha * s * h)
            w /= w.sum()
            if err == 0.0:
                self.stop_reason_ = "perfect weak learner"
                break
        if not self.stumps_:
            self.prior_ = float(y.mean())
            self.warnings_.append("adaboost: no round accepted; scoring the class prior")
        return self

    def decision_function(self, X):
        if not self.stumps_:
            return None
        votes = sum(a * np.where(t.predict(X) >= 0.5, 1.0, -1.0) for a, t in zip(self.alphas_, self.stumps_))
        return votes / sum(self.alphas_)

    def predict_proba(self, X):
        F = self.decision_function(X)
        if F is None:
            return np.full(X.shape[0], self.prior_)
        return _sigmoid(F)


class EasyEnsemble:
    """AdaBoost on several balanced undersamples; scores are averaged."""

    def __init__(self, n_subsets=10, n_rounds=100):
        self.n_subsets = n_subsets
        self.n_rounds = n_rounds
        self.warnings_ = []

    def fit(self, X, y, seed=0):
        gen = make_rng(seed)
        y = np.asarray(y)
        minority = np.flatnonzero(y == 1)
        majority = np.flatnonzero(y == 0)
        take = min(len(majority), len(minority))
        self.subsets_, self.members_ = [], []
        for _ in range(self.n_subsets):
            rows = np.sort(np.concatenate([minority, gen.choice(majority, take, replace=False)]))
            member = AdaBoost(self.n_rounds).fit(X[rows], y[rows], int(gen.integers(2**63 - 1)))
            self.warnings_.extend(member.warnings_)
            self.subsets_.append(rows)
            self.members_.append(member)
        return self

    def predict_proba(self, X):
        return np.mean([m.predict_proba(X) for m in self.members_], axis=0)


class GradientBoosting:
    """Log-loss gradient boosting with depth-limited least-squares trees.

    Leaves take a Newton step; each round's step is shrunk by
    ``learning_rate`` and halved further until training loss does not rise.
    """

    def __init__(self, n_rounds=100, max_depth=3, learning_rate=0.1, min_leaf=5):
        self.n_rounds = n_rounds
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.min_leaf = min_leaf
        self.warnings_ = []

    @staticmethod
    def log_loss(y, F):
        return float(np.mean(np.logaddexp(0.0, F) - y * F))

    def fit(self, X, y, seed=None):
        y = np.asarray(y, dtype=float)
        p0 = min(max(y.mean(), 1e-12), 1 - 1e-12)
        self.init_ = math.log(p0 / (1 - p0))
        F = np.full(len(y), self.init_)
        orders = presort(X)
        loss = self.log_loss(y, F)
        self.loss_history_ = [loss]
        self.trees_, self.steps_ = [], []
        for _ in range(self.n_rounds):
            p = _sigmoid(F)
            resid = y - p
            tree = grow_regression_tree(X, resid, self.max_depth, self.min_leaf, orders)
            leaves = tree.apply(X)
            num = np.bincount(leaves, resid, minlength=tree.n_nodes)
            den = np.bincount(leaves, p * (1 - p), minlength=tree.n_nodes)
            gamma = np.where(den > 1e-12, num / np.maximum(den, 1e-12), 0.0)
            step = self.learning_rate
            for _ in range(30):
                trial = F + step * gamma[leaves]
                trial_loss = self.log_loss(y, trial)
                if trial_loss <= loss:
                    break
                step *= 0.5
            else:
                step, trial, trial_loss = 0.0, F, loss
            values = step * gamma
            self.trees_.append(type(tree)(tree.feature, tree.threshold, tree.left, tree.right, values))
            self.steps_.append(step)
            F, loss = trial, trial_loss
            self.loss_history_.append(loss)
        return self

    def decision_function(self, X):
        F = np.full(X.shape[0], self.init_)
        for t in self.trees_:
            F += t.predict(X)
        return F

    def predict_proba(self, X):
        return _sigmoid(self.decision_function(X))
