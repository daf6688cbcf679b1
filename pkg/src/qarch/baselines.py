"""Logistic-regression baseline for the classical comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset


@dataclass
class LogRegModel:
    coefficients: np.ndarray
    intercept: float

    @property
    def n_parameters(self) -> int:
        return int(self.coefficients.size) + 1


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _objective(w, b, X, y, l2):
    p = np.clip(_sigmoid(X @ w + b), 1e-12, 1 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)) + 0.5 * l2 * w @ w)


def logreg_train(train: Dataset, l2: float = 1e-4, max_iter: int = 5000, lr: float = 0.1,
                 tol: float = 1e-6, history: list | None = None) -> LogRegModel:
    """Gradient descent on L2-regularized mean BCE (intercept unpenalized).

    Stops when the gradient norm drops below ``tol`` or after ``max_iter``
    steps. If ``history`` is given, the objective at each iterate is appended.
    """
    if len(train) == 0:
        raise ValueError("empty training set")
    if np.unique(train.labels).size < 2:
        raise ValueError("logistic regression needs both classes present")
    X = train.features
    y = train.labels.astype(np.float64)
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(max_iter):
        p = _sigmoid(X @ w + b)
        residual = p - y
        gw = X.T @ residual / len(y) + l2 * w
        gb = float(residual.mean())
        if history is not None:
            history.append(_objective(w, b, X, y, l2))
        if np.sqrt(gw @ gw + gb * gb) < tol:
            break
        w = w - lr * gw
        b = b - lr * gb
    return LogRegModel(w, b)


def logreg_predict(model: LogRegModel, features) -> np.ndarray:
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if X.shape[1] != model.coefficients.size:
        raise ValueError(f"expected {model.coefficients.size} features, got {X.shape[1]}")
    return _sigmoid(X @ model.coefficients + model.intercept)


def logreg_accuracy(model: LogRegModel, d: Dataset) -> float:
    return float(np.mean((logreg_predict(model, d.features) >= 0.5) == d.labels))
