"""Shared preprocessing and the logistic-regression classifier.

Every supervised method in the benchmark trains the same classifier:
full-batch gradient descent on L2-regularized log-loss with backtracking
line search, zero initialization, so fits are deterministic and
dependency-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_PRIOR_CLIP = 1e-7
_SCORE_CLIP = 36.0  # |affine score| cap; past this the sigmoid saturates in float64


@dataclass(frozen=True)
class StandardizationParams:
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        stds = np.asarray(self.stds, dtype=float)
        if means.shape != stds.shape or means.ndim != 1:
            raise ValueError("means/stds must be 1-d arrays of equal length")
        if np.any(stds < 0):
            raise ValueError("standard deviations must be non-negative")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)


@dataclass(frozen=True)
class TrainConfig:
    l2_strength: float = 1e-4
    max_iters: int = 5000
    tolerance: float = 1e-8


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    standardization: StandardizationParams

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if not (np.all(np.isfinite(weights)) and math.isfinite(self.bias)):
            raise ValueError("model parameters must be finite")
        object.__setattr__(self, "weights", weights)


def zscore_fit(X: np.ndarray) -> StandardizationParams:
    """Per-column mean and sample (n-1) standard deviation; needs >= 2 rows.

    A constant column records std exactly 0 (mean rounding would otherwise
    leave a spurious tiny deviation).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("zscore_fit needs a 2-d matrix with at least 2 rows")
    stds = X.std(axis=0, ddof=1)
    stds[(X == X[0]).all(axis=0)] = 0.0
    return StandardizationParams(X.mean(axis=0), stds)


def zscore_apply(params: StandardizationParams, X: np.ndarray) -> np.ndarray:
    """(x - mean) / std per cell; columns with std 0 map to 0."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != params.means.shape[0]:
        raise ValueError("column count does not match standardization params")
    safe = np.where(params.stds > 0, params.stds, 1.0)
    Z = (X - params.means) / safe
    Z[:, params.stds == 0] = 0.0
    return Z


def _sigmoid(t: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(t, -_SCORE_CLIP, _SCORE_CLIP)))


def _loss(w: np.ndarray, b: float, Z: np.ndarray, y: np.ndarray, l2: float) -> float:
    t = Z @ w + b
    # log(1 + exp(-s*t)) computed stably via logaddexp
    signed = np.where(y > 0.5, t, -t)
    return float(np.mean(np.logaddexp(0.0, -signed))) + 0.5 * l2 * float(w @ w)


def _loss_and_grad(w: np.ndarray, b: float, Z: np.ndarray, y: np.ndarray, l2: float):
    """Mean log-loss with L2 penalty on the weights (bias unpenalized)."""
    loss = _loss(w, b, Z, y, l2)
    resid = _sigmoid(Z @ w + b) - y
    grad_w = Z.T @ resid / len(y) + l2 * w
    grad_b = float(np.mean(resid))
    return loss, grad_w, grad_b


def _gd_fit(Z: np.ndarray, y: np.ndarray, cfg: TrainConfig):
    """Gradient descent with backtracking line search from zero init.

    Returns (weights, bias, per-iteration losses). The line search halves
    the step until the Armijo condition holds, so the loss sequence is
    non-increasing.
    """
    w = np.zeros(Z.shape[1])
    b = 0.0
    loss, gw, gb = _loss_and_grad(w, b, Z, y, cfg.l2_strength)
    losses = [loss]
    step = 1.0
    for _ in range(cfg.max_iters):
        gnorm2 = float(gw @ gw) + gb * gb
        if math.sqrt(gnorm2) < cfg.tolerance:
            break
        step = min(step * 2.0, 1e8)
        while True:
            w_new = w - step * gw
            b_new = b - step * gb
            new_loss = _loss(w_new, b_new, Z, y, cfg.l2_strength)
            if new_loss <= loss - 1e-4 * step * gnorm2 or step < 1e-16:
                break
            step *= 0.5
        w, b = w_new, b_new
        loss, gw, gb = _loss_and_grad(w, b, Z, y, cfg.l2_strength)
        losses.append(loss)
    return w, b, losses


def train_logistic(X: np.ndarray, y, cfg: TrainConfig = TrainConfig()) -> LogisticModel:
    """Deterministic logistic fit on standardized features.

    Single-class labels yield the constant model predicting that class's
    prior (clipped so the bias stays finite).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=bool)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X rows must match label count")
    if X.shape[0] == 0:
        raise ValueError("need at least one training example")
    n_features = X.shape[1]
    if y.all() or not y.any():
        prior = min(max(float(np.mean(y)), _PRIOR_CLIP), 1.0 - _PRIOR_CLIP)
        params = StandardizationParams(np.zeros(n_features), np.zeros(n_features))
        return LogisticModel(np.zeros(n_features), math.log(prior / (1.0 - prior)), params)
    params = zscore_fit(X)
    Z = zscore_apply(params, X)
    w, b, _ = _gd_fit(Z, y.astype(float), cfg)
    return LogisticModel(w, b, params)


def predict_proba(model: LogisticModel, X: np.ndarray) -> np.ndarray:
    """Defect-proneness scores strictly inside (0, 1)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.weights.shape[0]:
        raise ValueError("feature count does not match model")
    Z = zscore_apply(model.standardization, X)
    return _sigmoid(Z @ model.weights + model.bias)
