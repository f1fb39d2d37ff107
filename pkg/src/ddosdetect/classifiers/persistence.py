"""Versioned JSON model artifacts.

Floats are written with Python's shortest round-tripping repr, so a load
reproduces every parameter bit for bit. Field list: see README.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ..errors import CorruptModel, UnsupportedVersion
from ..preprocess import Scaler
from .base import TrainedModel
from .logistic import LogisticModel
from .svm import SvmModel
from .tree import TreeModel, TreeNode

FORMAT_NAME = "ddosdetect-model"
FORMAT_VERSION = 1

_KINDS = {cls.kind: cls for cls in (LogisticModel, SvmModel, TreeModel)}


def _floats(arr) -> list[float]:
    return [float(v) for v in np.asarray(arr, dtype=np.float64)]


def model_to_dict(model: TrainedModel) -> dict:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "feature_names": list(model.feature_names),
        "scaler": None if model.scaler is None else {
            "mean": _floats(model.scaler.mean),
            "std": _floats(model.scaler.std),
        },
        "hyperparams": model.hyperparams,
        "preprocess": model.preprocess,
        "training": model.training,
    }
    if isinstance(model, LogisticModel):
        doc["params"] = {"intercept": model.intercept, "coefficients": _floats(model.coefficients)}
    elif isinstance(model, SvmModel):
        doc["params"] = {"weights": _floats(model.weights), "bias": model.bias, "lambda": model.lam}
    elif isinstance(model, TreeModel):
        doc["params"] = {"nodes": [
            [nd.feature, None if nd.is_leaf else nd.threshold, nd.left, nd.right, *nd.counts]
            for nd in model.nodes
        ]}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return doc


def dumps_model(model: TrainedModel) -> str:
    return json.dumps(model_to_dict(model), indent=1, sort_keys=False) + "\n"


def save_model(model: TrainedModel, sink) -> None:
    """Write ``model`` to a path or a text stream."""
    text = dumps_model(model)
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text, encoding="utf-8")
    else:
        sink.write(text)


def loads_model(text: str) -> TrainedModel:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as err:
        raise CorruptModel(f"model file is not valid JSON: {err}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise CorruptModel("not a ddosdetect model file")
    if "version" not in doc:
        raise CorruptModel("model file has no version field")
    if str(doc["version"]) != str(FORMAT_VERSION):
        raise UnsupportedVersion(f"model format version {doc['version']!r} is not supported "
                                 f"(expected {FORMAT_VERSION})")
    try:
        return _from_dict(doc)
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise CorruptModel(f"model file is malformed: {err!r}") from None


def load_model(source) -> TrainedModel:
    """Read a model from a path or a text/binary stream."""
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except UnicodeDecodeError as err:
            raise CorruptModel(f"model file is not UTF-8: {err.reason}") from None
    else:
        text = source.read()
        if isinstance(text, bytes):
            try:
                text = text.decode("utf-8")
            except UnicodeDecodeError as err:
                raise CorruptModel(f"model file is not UTF-8: {err.reason}") from None
    return loads_model(text)


def _from_dict(doc) -> TrainedModel:
    kind = doc["kind"]
    if kind not in _KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    scaler = None
    if doc["scaler"] is not None:
        scaler = Scaler(np.array(doc["scaler"]["mean"], dtype=np.float64),
                        np.array(doc["scaler"]["std"], dtype=np.float64))
    common = dict(
        feature_names=tuple(_str_list(doc["feature_names"])),
        scaler=scaler,
        hyperparams=_mapping(doc["hyperparams"]),
        preprocess=_mapping(doc["preprocess"]),
        training=_mapping(doc["training"]),
    )
    params = doc["params"]
    if kind == "logistic":
        return LogisticModel(intercept=_number(params["intercept"]),
                             coefficients=_number_list(params["coefficients"]), **common)
    if kind == "svm":
        return SvmModel(weights=_number_list(params["weights"]), bias=_number(params["bias"]),
                        lam=_number(params["lambda"]), **common)
    nodes = []
    for entry in params["nodes"]:
        feature, threshold, left, right, n_benign, n_ddos = entry
        ints = (feature, left, right, n_benign, n_ddos)
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in ints):
            raise ValueError(f"non-integer field in tree node {entry!r}")
        if feature >= 0:
            threshold = _number(threshold)
            if not math.isfinite(threshold):
                raise ValueError(f"non-finite threshold in tree node {entry!r}")
        else:
            threshold = float("nan")
        nodes.append(TreeNode((n_benign, n_ddos), feature, threshold, left, right))
    return TreeModel(nodes=nodes, **common)


def _number(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"expected a number, got {v!r}")
    return float(v)


def _number_list(v) -> np.ndarray:
    if not isinstance(v, list):
        raise ValueError(f"expected a list of numbers, got {v!r}")
    return np.array([_number(x) for x in v], dtype=np.float64)


def _str_list(v) -> list[str]:
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise ValueError(f"expected a list of strings, got {v!r}")
    return v


def _mapping(v) -> dict:
    if not isinstance(v, dict):
        raise ValueError(f"expected an object, got {v!r}")
    return v


__all__ = ["FORMAT_VERSION", "dumps_model", "load_model", "loads_model", "model_to_dict", "save_model"]
