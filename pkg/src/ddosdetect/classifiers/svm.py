"""Linear soft-margin SVM trained with Pegasos-style stochastic subgradient steps.

Objective, with labels mapped BENIGN -> -1 and DDoS -> +1::

    (lam / 2) * ||w||^2 + mean_i max(0, 1 - y_i * (w . x_i + b))

The bias ``b`` is not regularized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch
from ..preprocess import FeatureMatrix, Scaler
from .base import Hyperparams, SvmParams, TrainedModel, require_both_classes, training_rows


def signed_labels(codes) -> np.ndarray:
    return np.where(np.asarray(codes) == 1, 1.0, -1.0)


def hinge_objective(w, b, X, y_signed, lam) -> float:
    margins = y_signed * (X @ w + b)
    return float(0.5 * lam * (w @ w) + np.maximum(0.0, 1.0 - margins).mean())


# the returned model may be at most this much worse than the best epoch
FINAL_TOLERANCE = 0.05


def pegasos(X, y_signed, params: SvmParams):
    """Run the subgradient solver; returns (w, b, objective after each epoch).

    Step size at update t is 1/(lam*t), and ``w`` is projected back onto
    the ball of radius 1/sqrt(lam) that contains the optimum. With
    ``lam == 0`` the step falls back to 1/sqrt(t) and no projection.

    Stochastic iterates wander, so the best epoch-end snapshot is kept and
    returned instead of the last one if the last is more than
    ``FINAL_TOLERANCE`` worse.
    """
    X = np.asarray(X, dtype=np.float64)
    n, k = X.shape
    lam = params.lam
    rng = np.random.default_rng(params.seed)
    # plain floats: for a handful of features this beats per-step numpy calls
    w = [0.0] * k
    b = 0.0
    t = 0
    radius_sq = 1.0 / lam if lam > 0 else float("inf")
    history = []
    best = (math.inf, None, 0.0)
    rows = X.tolist()
    ys = np.asarray(y_signed, dtype=np.float64).tolist()
    for _ in range(params.epochs):
        for i in rng.permutation(n).tolist():
            t += 1
            eta = 1.0 / (lam * t) if lam > 0 else 1.0 / math.sqrt(t)
            xi = rows[i]
            yi = ys[i]
            score = b
            for wj, xj in zip(w, xi):
                score += wj * xj
            shrink = 1.0 - eta * lam
            if yi * score < 1.0:
                step = eta * yi
                w = [shrink * wj + step * xj for wj, xj in zip(w, xi)]
                b += step
            elif shrink != 1.0:
                w = [shrink * wj for wj in w]
            norm_sq = sum(wj * wj for wj in w)
            if norm_sq > radius_sq:
                scale = math.sqrt(radius_sq / norm_sq)
                w = [scale * wj for wj in w]
        obj = hinge_objective(np.array(w), b, X, y_signed, lam)
        history.append(obj)
        if obj < best[0]:
            best = (obj, list(w), b)
    if history and history[-1] > best[0] * (1.0 + FINAL_TOLERANCE):
        _, w, b = best
    return np.array(w), b, history


@dataclass(eq=False, kw_only=True)
class SvmModel(TrainedModel):
    kind = "svm"

    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bias: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        self.bias = float(self.bias)
        self.lam = float(self.lam)
        if self.weights.shape[0] != len(self.feature_names):
            raise DimensionMismatch(f"{self.weights.shape[0]} weights for {len(self.feature_names)} features")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias)):
            raise ValueError("svm weights must be finite")
        super().__post_init__()

    def decision_function(self, X) -> np.ndarray:
        return self.prepare(X) @ self.weights + self.bias

    def predict_codes(self, X) -> np.ndarray:
        # a point exactly on the hyperplane stays BENIGN
        return (self.decision_function(X) > 0.0).astype(np.int8)


def train_svm(train: FeatureMatrix, h: Hyperparams | None = None, *,
              scaler: Scaler | None = None) -> SvmModel:
    require_both_classes(train)
    h = h or Hyperparams()
    w, b, history = pegasos(training_rows(train, scaler), signed_labels(train.y), h.svm)
    return SvmModel(
        feature_names=train.feature_names,
        scaler=scaler,
        hyperparams=h.for_kind("svm"),
        weights=w,
        bias=b,
        lam=h.svm.lam,
        training={"objective_history": history},
    )
