"""Cleaning, feature selection, standardization and train/test splitting."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllRecordsDropped,
    ClassTooSmall,
    DimensionMismatch,
    NonFiniteFeature,
    UnknownFeature,
)
from .flow_data import NUMERIC_FIELDS, Dataset, Label

# Byte-oriented attributes: forward/backward payload totals and initial TCP windows.
DEFAULT_FEATURES: tuple[str, ...] = (
    "total_len_fwd",
    "total_len_bwd",
    "init_win_fwd",
    "init_win_bwd",
)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """``X`` is n x k float64, ``y`` holds n label codes (0 benign, 1 DDoS)."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        y = np.array(self.y, dtype=np.int8)
        if X.ndim != 2:
            raise DimensionMismatch(f"feature rows must be 2-D, got shape {X.shape}")
        n, k = X.shape
        if n == 0 or k == 0:
            raise DimensionMismatch(f"feature matrix must be non-empty, got shape {X.shape}")
        if y.shape != (n,):
            raise DimensionMismatch(f"{y.shape[0] if y.ndim else 0} labels for {n} rows")
        if len(self.feature_names) != k:
            raise DimensionMismatch(f"{len(self.feature_names)} names for {k} columns")
        if not np.isfinite(X).all():
            raise NonFiniteFeature("feature matrix contains NaN or infinite values; run clean() first")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be 0 (BENIGN) or 1 (DDoS)")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    @property
    def labels(self) -> list[Label]:
        return [Label(int(v)) for v in self.y]

    def take(self, idx) -> "FeatureMatrix":
        return FeatureMatrix(self.X[idx], self.y[idx], self.feature_names)

    def with_rows(self, X) -> "FeatureMatrix":
        return FeatureMatrix(X, self.y, self.feature_names)

    def class_counts(self) -> dict[Label, int]:
        return {lab: int(np.sum(self.y == lab)) for lab in Label}


def clean(ds: Dataset) -> tuple[Dataset, int]:
    """Drop records holding NaN or infinite numerics.

    Returns the cleaned dataset and the number of removed records.
    """
    kept = tuple(r for r in ds.records if r.is_finite())
    if not kept:
        raise AllRecordsDropped()
    removed = len(ds.records) - len(kept)
    if removed == 0:
        return ds, 0
    return Dataset(kept, ds.source_name, ds.rejected), removed


def select_features(ds: Dataset, names=DEFAULT_FEATURES) -> FeatureMatrix:
    names = tuple(names)
    if not names:
        raise DimensionMismatch("select at least one feature")
    for name in names:
        if name not in NUMERIC_FIELDS:
            raise UnknownFeature(name)
    X = np.array([[getattr(r, name) for name in names] for r in ds.records], dtype=np.float64)
    return FeatureMatrix(X.reshape(len(ds.records), len(names)), ds.labels(), names)


@dataclass(frozen=True, eq=False)
class Scaler:
    """Z-score parameters. Constant columns carry std 1 so they stay inert after centering."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        std = np.asarray(self.std, dtype=np.float64).reshape(-1)
        if mean.shape != std.shape:
            raise DimensionMismatch("scaler mean/std lengths differ")
        if not (std > 0).all():
            raise ValueError("scaler std entries must be positive")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @property
    def k(self) -> int:
        return self.mean.shape[0]

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.k:
            raise DimensionMismatch(f"scaler fitted on {self.k} columns, got {X.shape[-1]}")
        return X

    def transform(self, X) -> np.ndarray:
        return (self._check(X) - self.mean) / self.std

    def inverse_transform(self, Z) -> np.ndarray:
        return self._check(Z) * self.std + self.mean

    @classmethod
    def identity(cls, k: int) -> "Scaler":
        return cls(np.zeros(k), np.ones(k))


def fit_scaler(train: FeatureMatrix) -> Scaler:
    mean = train.X.mean(axis=0)
    std = train.X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return Scaler(mean, std)


def apply_scaler(s: Scaler, m: FeatureMatrix) -> FeatureMatrix:
    return m.with_rows(s.transform(m.X))


@dataclass(frozen=True)
class SplitConfig:
    test_fraction: float = 0.2
    seed: int = 42
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")

    def to_dict(self) -> dict:
        return {"test_fraction": self.test_fraction, "seed": self.seed, "stratified": self.stratified}


def n_test_for(n: int, test_fraction: float) -> int:
    # the epsilon keeps exact products like 100 * 0.2 from rounding up to 21
    return math.ceil(n * test_fraction - 1e-9)


def stratified_allocation(class_sizes: list[int], n_test: int) -> list[int]:
    """Per-class test counts summing to ``n_test``.

    Each count stays within one sample of the class's exact proportional
    share and leaves at least one sample of every class on both sides of
    the split. Among admissible allocations the one closest to the exact
    shares wins (ties: lowest count for the earliest class). Raises
    ClassTooSmall when no admissible allocation exists.
    """
    n = sum(class_sizes)
    if any(c < 2 for c in class_sizes):
        raise ClassTooSmall(f"stratified split needs >= 2 samples per class, got {class_sizes}")

    ideal = [c * n_test / n for c in class_sizes]
    windows = [
        range(max(1, math.floor(e - 1)), min(c - 1, math.ceil(e + 1)) + 1)
        for e, c in zip(ideal, class_sizes)
    ]
    best = None
    best_cost = None
    for alloc in itertools.product(*windows):
        if sum(alloc) != n_test or any(abs(t - e) > 1 + 1e-12 for t, e in zip(alloc, ideal)):
            continue
        cost = sum((t - e) ** 2 for t, e in zip(alloc, ideal))
        if best is None or cost < best_cost - 1e-12:
            best, best_cost = alloc, cost
    if best is None:
        raise ClassTooSmall(
            f"no stratified split of class sizes {class_sizes} puts {n_test} samples "
            "in the test half with every class on both sides")
    return list(best)


def split_indices(y: np.ndarray, cfg: SplitConfig) -> tuple[np.ndarray, np.ndarray]:
    """Sorted (train, test) row indices for a label vector."""
    y = np.asarray(y)
    n = y.shape[0]
    n_test = n_test_for(n, cfg.test_fraction)
    if n_test >= n:
        raise ClassTooSmall(f"cannot split {n} samples with test_fraction {cfg.test_fraction}")
    rng = np.random.default_rng(cfg.seed)
    if not cfg.stratified:
        perm = rng.permutation(n)
        test = np.sort(perm[:n_test])
    else:
        members = [np.flatnonzero(y == c) for c in np.unique(y)]
        alloc = stratified_allocation([len(m) for m in members], n_test)
        picked = [rng.permutation(m)[:t] for m, t in zip(members, alloc)]
        test = np.sort(np.concatenate(picked))
    mask = np.ones(n, dtype=bool)
    mask[test] = False
    return np.flatnonzero(mask), test


def train_test_split(m: FeatureMatrix, cfg: SplitConfig | None = None) -> tuple[FeatureMatrix, FeatureMatrix]:
    cfg = cfg or SplitConfig()
    train_idx, test_idx = split_indices(m.y, cfg)
    return m.take(train_idx), m.take(test_idx)
