"""Logistic regression fitted by full-batch gradient descent.

The model is p = e^y / (1 + e^y) with y = g0 + g1*x1 + ... + gk*xk. The
parameter vector ``gamma`` packs the intercept first: (g0, g1, ..., gk).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch
from ..preprocess import FeatureMatrix, Scaler
from .base import Hyperparams, LogisticParams, TrainedModel, require_both_classes, training_rows

# step sizes below this fraction of the configured rate count as converged
_MIN_STEP_RATIO = 2.0 ** -40


def sigmoid(z):
    """e^z / (1 + e^z) without ever exponentiating a large positive number."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def _linear(gamma, X):
    return gamma[0] + X @ gamma[1:]


def logistic_loss(gamma, X, y, l2=0.0) -> float:
    """Mean negative log-likelihood plus (l2/2)*||g1..gk||^2."""
    gamma = np.asarray(gamma, dtype=np.float64)
    z = _linear(gamma, X)
    # -log-likelihood of one row is log(1 + e^z) - y*z
    nll = np.logaddexp(0.0, z) - y * z
    return float(nll.mean() + 0.5 * l2 * gamma[1:] @ gamma[1:])


def logistic_gradient(gamma, X, y, l2=0.0) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=np.float64)
    resid = sigmoid(_linear(gamma, X)) - y
    grad = np.empty_like(gamma)
    grad[0] = resid.mean()
    grad[1:] = X.T @ resid / X.shape[0] + l2 * gamma[1:]
    return grad


def gradient_descent(X, y, params: LogisticParams) -> tuple[np.ndarray, list[float]]:
    """Minimize :func:`logistic_loss`; returns (gamma, loss after each iteration).

    A step that would raise the loss is halved until it does not, and the
    smaller step is kept from then on, so the history never increases.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    gamma = np.zeros(X.shape[1] + 1)
    loss = logistic_loss(gamma, X, y, params.l2)
    losses = [loss]
    step = params.learning_rate
    for _ in range(params.iterations):
        grad = logistic_gradient(gamma, X, y, params.l2)
        while True:
            candidate = gamma - step * grad
            cand_loss = logistic_loss(candidate, X, y, params.l2)
            if cand_loss <= loss:
                break
            step *= 0.5
            if step < params.learning_rate * _MIN_STEP_RATIO:
                return gamma, losses
        gamma, loss = candidate, cand_loss
        losses.append(loss)
    return gamma, losses


@dataclass(eq=False, kw_only=True)
class LogisticModel(TrainedModel):
    kind = "logistic"

    intercept: float = 0.0
    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.intercept = float(self.intercept)
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64).reshape(-1)
        if self.coefficients.shape[0] != len(self.feature_names):
            raise DimensionMismatch(
                f"{self.coefficients.shape[0]} coefficients for {len(self.feature_names)} features")
        if not (np.isfinite(self.coefficients).all() and np.isfinite(self.intercept)):
            raise ValueError("logistic coefficients must be finite")
        super().__post_init__()

    @property
    def gamma(self) -> np.ndarray:
        return np.concatenate([[self.intercept], self.coefficients])

    def linear_predictor(self, X) -> np.ndarray:
        return _linear(self.gamma, self.prepare(X))

    def probability(self, X) -> np.ndarray:
        return np.atleast_1d(sigmoid(self.linear_predictor(X)))

    def predict_codes(self, X) -> np.ndarray:
        # p >= 0.5 counts as an attack
        return (np.atleast_1d(self.probability(X)) >= 0.5).astype(np.int8)


def logistic_probability(model: LogisticModel, x) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != model.k:
        raise DimensionMismatch(f"model expects {model.k} features, got {x.shape[0]}")
    return float(model.probability(x.reshape(1, -1))[0])


def train_logistic(train: FeatureMatrix, h: Hyperparams | None = None, *,
                   scaler: Scaler | None = None) -> LogisticModel:
    require_both_classes(train)
    params = (h or Hyperparams()).logistic
    gamma, losses = gradient_descent(training_rows(train, scaler), train.y, params)
    return LogisticModel(
        feature_names=train.feature_names,
        scaler=scaler,
        hyperparams=(h or Hyperparams()).for_kind("logistic"),
        intercept=gamma[0],
        coefficients=gamma[1:],
        training={"iterations_run": len(losses) - 1, "final_loss": losses[-1]},
    )
