"""End-to-end glue: clean -> select -> split -> scale -> train -> evaluate.

The CLI commands are thin wrappers around these functions, which keeps
``bench`` and ``train`` + ``evaluate`` on exactly the same code path.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import classifiers
from .classifiers import DISPLAY_NAMES, Hyperparams, TrainedModel
from .errors import ModelDataMismatch
from .evaluate import EvalReport, evaluate_predictions
from .flow_data import NUMERIC_FIELDS, Dataset
from .preprocess import (
    DEFAULT_FEATURES,
    FeatureMatrix,
    SplitConfig,
    clean,
    fit_scaler,
    select_features,
    split_indices,
)


@dataclass(frozen=True)
class Prepared:
    dataset: Dataset          # after cleaning
    removed: int
    matrix: FeatureMatrix     # unscaled, all rows
    train: FeatureMatrix
    test: FeatureMatrix
    split: SplitConfig


def prepare(ds: Dataset, features=DEFAULT_FEATURES, split: SplitConfig | None = None) -> Prepared:
    split = split or SplitConfig()
    cleaned, removed = clean(ds)
    matrix = select_features(cleaned, features)
    train_idx, test_idx = split_indices(matrix.y, split)
    return Prepared(cleaned, removed, matrix, matrix.take(train_idx), matrix.take(test_idx), split)


def fit(kind: str, prep: Prepared, h: Hyperparams | None = None) -> TrainedModel:
    """Train one classifier on the training half; the scaler comes from that half only."""
    scaler = fit_scaler(prep.train)
    model = classifiers.train(kind, prep.train, h, scaler=scaler)
    model.preprocess = {
        "features": list(prep.matrix.feature_names),
        "split": prep.split.to_dict(),
        "clean": "drop non-finite records",
        "scaling": "z-score fitted on training half",
    }
    return model


def score(model: TrainedModel, m: FeatureMatrix) -> EvalReport:
    return evaluate_predictions(m.y, model.predict_codes(m.X), DISPLAY_NAMES.get(model.kind, model.kind))


def model_matrix(model: TrainedModel, ds: Dataset, subset: str = "all") -> FeatureMatrix:
    """Rows of ``ds`` in the model's feature order, optionally re-deriving its split."""
    unknown = [f for f in model.feature_names if f not in NUMERIC_FIELDS]
    if unknown:
        raise ModelDataMismatch(f"model features {unknown} are not flow-record columns")
    cleaned, _ = clean(ds)
    matrix = select_features(cleaned, model.feature_names)
    if subset == "all":
        return matrix
    split_info = model.preprocess.get("split")
    if not split_info:
        raise ModelDataMismatch("model does not record a train/test split")
    train_idx, test_idx = split_indices(matrix.y, SplitConfig(**split_info))
    return matrix.take(test_idx if subset == "test" else train_idx)


@dataclass(frozen=True)
class BenchResult:
    reports: list[EvalReport]
    models: dict[str, TrainedModel]
    train_ms: dict[str, float]


def bench(prep: Prepared, h: Hyperparams | None = None, kinds=("logistic", "svm", "tree")) -> BenchResult:
    """Train every classifier on the same training half and score on the same test half."""
    reports, models, timings = [], {}, {}
    for kind in kinds:
        start = time.perf_counter()
        model = fit(kind, prep, h)
        timings[kind] = (time.perf_counter() - start) * 1000.0
        models[kind] = model
        reports.append(score(model, prep.test))
    return BenchResult(reports, models, timings)


def accuracy(model: TrainedModel, m: FeatureMatrix) -> float:
    return float(np.mean(model.predict_codes(m.X) == m.y))
