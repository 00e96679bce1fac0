import numpy as np

from ..seeding import rng as make_rng


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


class LinearSVM:
    """Linear soft-margin SVM trained by mini-batch Pegasos subgradient steps.

    The bias rides along as a constant feature, so it is regularised and
    projected with the weights. Margins are squashed through a logistic
    function to give scores in [0, 1]; these are not calibrated probabilities.
    """

    def __init__(self, lam=1e-4, epochs=20, batch_size=32, tol=1e-2):
        self.lam = lam
        self.epochs = epochs
        self.batch_size = batch_size
        self.tol = tol
        self.warnings_ = []

    def _objective(self, Xa, s, w):
        hinge = np.maximum(0.0, 1.0 - s * (Xa @ w))
        return 0.5 * self.lam * (w @ w) + hinge.mean()

    def fit(self, X, y, seed=0):
        gen = make_rng(seed)
        Xa = np.hstack([X, np.ones((len(X), 1))])
        s = np.where(np.asarray(y) == 1, 1.0, -1.0)
        n = len(s)
        w = np.zeros(Xa.shape[1])
        radius = 1.0 / np.sqrt(self.lam)
        t = 0
        history = []
        for _ in range(self.epochs):
            order = gen.permutation(n)
            for b in range(0, n, self.batch_size):
                batch = order[b:b + self.batch_size]
                t += 1
                eta = 1.0 / (self.lam * t)
                viol = batch[s[batch] * (Xa[batch] @ w) < 1.0]
                w *= 1.0 - eta * self.lam
                if viol.size:
                    w += (eta / len(batch)) * (s[viol] @ Xa[viol])
                norm = np.sqrt(w @ w)
                if norm > radius:
                    w *= radius / norm
            history.append(self._objective(Xa, s, w))
        if len(history) > 1 and abs(history[-1] - history[-2]) > self.tol * max(history[-2], 1e-12):
            self.warnings_.append("svm: objective still moving after final epoch")
        self.coef_ = w[:-1].copy()
        self.intercept_ = float(w[-1])
        self.objective_history_ = history
        return self

    def decision_function(self, X):
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        return _sigmoid(self.decision_function(X))
