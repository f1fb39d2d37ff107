"""Hyperparameters and the prediction contract shared by all three models."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import ClassVar

import numpy as np

from ..errors import DimensionMismatch, InvalidConfig, SingleClass
from ..flow_data import Label
from ..preprocess import FeatureMatrix, Scaler


@dataclass(frozen=True)
class LogisticParams:
    learning_rate: float = 0.1
    iterations: int = 500
    l2: float = 1e-4

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidConfig("learning_rate must be > 0")
        if self.iterations <= 0:
            raise InvalidConfig("iterations must be > 0")
        if self.l2 < 0:
            raise InvalidConfig("l2 must be >= 0")


@dataclass(frozen=True)
class SvmParams:
    lam: float = 1e-3
    epochs: int = 20
    seed: int = 42

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidConfig("lambda must be >= 0")
        if self.epochs <= 0:
            raise InvalidConfig("epochs must be > 0")


@dataclass(frozen=True)
class TreeParams:
    max_depth: int | None = 10
    min_samples_split: int = 2
    impurity: str = "gini"

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise InvalidConfig("max_depth must be >= 1 (or None for unlimited)")
        if self.min_samples_split < 2:
            raise InvalidConfig("min_samples_split must be >= 2")
        if self.impurity != "gini":
            raise InvalidConfig(f"unsupported impurity {self.impurity!r}; only 'gini' is implemented")


@dataclass(frozen=True)
class Hyperparams:
    logistic: LogisticParams = field(default_factory=LogisticParams)
    svm: SvmParams = field(default_factory=SvmParams)
    tree: TreeParams = field(default_factory=TreeParams)

    def for_kind(self, kind: str) -> dict:
        return asdict(getattr(self, kind))


@dataclass(eq=False, kw_only=True)
class TrainedModel:
    """Common surface of LogisticModel, SvmModel and TreeModel.

    ``scaler`` (if any) is applied to raw inputs before the model sees
    them, so callers always pass unscaled feature vectors. ``preprocess``
    records how the training matrix was produced (features, split seed...)
    and ``training`` holds diagnostics such as loss histories.
    """

    kind: ClassVar[str] = ""

    feature_names: tuple[str, ...]
    scaler: Scaler | None = None
    hyperparams: dict = field(default_factory=dict)
    preprocess: dict = field(default_factory=dict)
    training: dict = field(default_factory=dict)

    def __post_init__(self):
        self.feature_names = tuple(self.feature_names)
        if self.scaler is not None and self.scaler.k != self.k:
            raise DimensionMismatch(f"scaler has {self.scaler.k} columns, model has {self.k} features")

    @property
    def k(self) -> int:
        return len(self.feature_names)

    def prepare(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.k:
            raise DimensionMismatch(f"model expects {self.k} features, got shape {X.shape}")
        if self.scaler is not None:
            X = self.scaler.transform(X)
        return X

    def predict_codes(self, X) -> np.ndarray:
        """Label codes (0 BENIGN, 1 DDoS) for raw feature rows."""
        raise NotImplementedError

    def predict(self, x) -> Label:
        return Label(int(self.predict_codes(np.asarray(x, dtype=np.float64).reshape(1, -1))[0]))


def predict(model: TrainedModel, x) -> Label:
    return model.predict(x)


def predict_many(model: TrainedModel, X) -> np.ndarray:
    return model.predict_codes(X)


def training_rows(train: FeatureMatrix, scaler: Scaler | None) -> np.ndarray:
    return train.X if scaler is None else scaler.transform(train.X)


def require_both_classes(train: FeatureMatrix) -> None:
    counts = np.bincount(train.y, minlength=2)
    if counts[0] == 0 or counts[1] == 0:
        raise SingleClass()
