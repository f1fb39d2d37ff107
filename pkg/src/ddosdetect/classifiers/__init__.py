"""From-scratch logistic regression, linear SVM and decision tree classifiers."""

from ..preprocess import FeatureMatrix, Scaler
from .base import (
    Hyperparams,
    LogisticParams,
    SvmParams,
    TrainedModel,
    TreeParams,
    predict,
    predict_many,
)
from .logistic import LogisticModel, logistic_probability, train_logistic
from .persistence import dumps_model, load_model, loads_model, save_model
from .svm import SvmModel, train_svm
from .tree import TreeModel, TreeNode, gini, train_tree

TRAINERS = {
    "logistic": train_logistic,
    "svm": train_svm,
    "tree": train_tree,
}

# Display names used in the scoreboard.
DISPLAY_NAMES = {
    "logistic": "Logistic Regression",
    "tree": "Decision Tree",
    "svm": "SVM",
}


def train(kind: str, train_matrix: FeatureMatrix, h: Hyperparams | None = None, *,
          scaler: Scaler | None = None) -> TrainedModel:
    try:
        trainer = TRAINERS[kind]
    except KeyError:
        raise ValueError(f"unknown classifier {kind!r}; choose from {sorted(TRAINERS)}") from None
    return trainer(train_matrix, h, scaler=scaler)


__all__ = [
    "DISPLAY_NAMES", "Hyperparams", "LogisticModel", "LogisticParams", "SvmModel", "SvmParams",
    "TRAINERS", "TrainedModel", "TreeModel", "TreeNode", "TreeParams", "dumps_model", "gini",
    "load_model", "loads_model", "logistic_probability", "predict", "predict_many", "save_model",
    "train", "train_logistic", "train_svm", "train_tree",
]
