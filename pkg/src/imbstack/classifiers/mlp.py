"""One-hidden-layer perceptron with ReLU units and a logistic output."""
import numpy as np

from ..seeding import rng as make_rng


def init_params(n_in, n_hidden, gen):
    # Glorot-uniform bounds
    b1 = np.sqrt(6.0 / (n_in + n_hidden))
    b2 = np.sqrt(6.0 / (n_hidden + 1))
    return {
        "W1": gen.uniform(-b1, b1, size=(n_in, n_hidden)),
        "b1": np.zeros(n_hidden),
        "W2": gen.uniform(-b2, b2, size=n_hidden),
        "b2": np.zeros(()),
    }


def forward(params, X):
    pre = X @ params["W1"] + params["b1"]
    hidden = np.maximum(pre, 0.0)
    logit = hidden @ params["W2"] + params["b2"]
    return pre, hidden, logit


def loss_and_grad(params, X, y):
    """Mean binary cross-entropy and its gradient with respect to ``params``."""
    pre, hidden, logit = forward(params, X)
    n = len(y)
    loss = np.mean(np.logaddexp(0.0, logit) - y * logit)
    p = np.exp(-np.logaddexp(0.0, -logit))
    dlogit = (p - y) / n
    dhidden = np.outer(dlogit, params["W2"]) * (pre > 0)
    grads = {
        "W1": X.T @ dhidden,
        "b1": dhidden.sum(axis=0),
        "W2": hidden.T @ dlogit,
        "b2": np.asarray(dlogit.sum()),
    }
    return float(loss), grads


class MLP:
    """Back-propagation network trained with Adam on shuffled minibatches."""

    def __init__(self, hidden=32, batch_size=64, learning_rate=0.01, epochs=30, tol=1e-4):
        self.hidden = hidden
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.tol = tol
        self.warnings_ = []

    def fit(self, X, y, seed=0):
        gen = make_rng(seed)
        y = np.asarray(y, dtype=float)
        params = init_params(X.shape[1], self.hidden, gen)
        m = {k: np.zeros_like(v) for k, v in params.items()}
        v = {k: np.zeros_like(v) for k, v in params.items()}
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        t = 0
        history = []
        for _ in range(self.epochs):
            order = gen.permutation(len(y))
            for b in range(0, len(y), self.batch_size):
                batch = order[b:b + self.batch_size]
                _, grads = loss_and_grad(params, X[batch], y[batch])
                t += 1
                for k in params:
                    m[k] = beta1 * m[k] + (1 - beta1) * grads[k]
                    v[k] = beta2 * v[k] + (1 - beta2) * grads[k] ** 2
                    mh = m[k] / (1 - beta1 ** t)
                    vh = v[k] / (1 - beta2 ** t)
                    params[k] = params[k] - self.learning_rate * mh / (np.sqrt(vh) + eps)
            history.append(loss_and_grad(params, X, y)[0])
        if len(history) > 1 and history[-2] - history[-1] > self.tol:
            self.warnings_.append("mlp: training loss still decreasing after final epoch")
        self.params_ = params
        self.loss_history_ = history
        return self

    def predict_proba(self, X):
        _, _, logit = forward(self.params_, X)
        return np.exp(-np.logaddexp(0.0, -logit))
