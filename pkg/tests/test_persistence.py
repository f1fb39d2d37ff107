import io
import json

import numpy as np
import pytest

from ddosdetect import pipeline, synth
from ddosdetect.classifiers import dumps_model, load_model, loads_model, save_model
from ddosdetect.errors import CorruptModel, UnsupportedVersion
from ddosdetect.preprocess import SplitConfig


@pytest.fixture(scope="module")
def models():
    ds = synth.generate(synth.SynthConfig(n_benign=300, n_ddos=300, seed=11, overlap=0.3))
    prep = pipeline.prepare(ds, split=SplitConfig(0.25, 3))
    return {kind: pipeline.fit(kind, prep) for kind in ("logistic", "svm", "tree")}


def _vectors(model, n=1000, seed=0):
    rng = np.random.default_rng(seed)
    mean, std = model.scaler.mean, model.scaler.std
    return mean + std * rng.normal(size=(n, model.k)) * 3


@pytest.mark.parametrize("kind", ["logistic", "svm", "tree"])
def test_round_trip_preserves_predictions(models, kind, tmp_path):
    model = models[kind]
    path = tmp_path / f"{kind}.json"
    save_model(model, path)
    again = load_model(path)
    X = _vectors(model)
    assert np.array_equal(model.predict_codes(X), again.predict_codes(X))
    assert type(again) is type(model)
    assert again.feature_names == model.feature_names
    assert again.preprocess == model.preprocess
    assert np.array_equal(again.scaler.mean, model.scaler.mean)
    assert np.array_equal(again.scaler.std, model.scaler.std)
    # a second save is byte-identical
    assert dumps_model(again) == path.read_text(encoding="utf-8")


def test_parameters_bit_exact(models):
    lr = loads_model(dumps_model(models["logistic"]))
    assert lr.intercept == models["logistic"].intercept
    assert np.array_equal(lr.coefficients, models["logistic"].coefficients)
    svm = loads_model(dumps_model(models["svm"]))
    assert np.array_equal(svm.weights, models["svm"].weights) and svm.bias == models["svm"].bias
    tree = loads_model(dumps_model(models["tree"]))
    for a, b in zip(tree.nodes, models["tree"].nodes):
        assert (a.feature, a.left, a.right, a.counts) == (b.feature, b.left, b.right, b.counts)
        assert a.is_leaf or a.threshold == b.threshold


def test_stream_round_trip(models):
    buf = io.StringIO()
    save_model(models["svm"], buf)
    again = load_model(io.BytesIO(buf.getvalue().encode()))
    assert np.array_equal(again.weights, models["svm"].weights)


def test_documented_fields(models):
    doc = json.loads(dumps_model(models["tree"]))
    assert doc["format"] == "ddosdetect-model" and doc["version"] == 1
    assert set(doc) == {"format", "version", "kind", "feature_names", "scaler", "hyperparams",
                        "preprocess", "training", "params"}
    assert doc["preprocess"]["split"] == {"test_fraction": 0.25, "seed": 3, "stratified": True}


def test_truncated_file_is_corrupt(models, tmp_path):
    path = tmp_path / "m.json"
    text = dumps_model(models["logistic"])
    path.write_text(text[: len(text) // 2], encoding="utf-8")
    with pytest.raises(CorruptModel):
        load_model(path)


def test_future_version_rejected(models):
    doc = json.loads(dumps_model(models["svm"]))
    doc["version"] = "99"
    with pytest.raises(UnsupportedVersion):
        loads_model(json.dumps(doc))


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("params"),
    lambda d: d.update(kind="forest"),
    lambda d: d["params"].update(weights=[1.0]),
    lambda d: d.update(format="other"),
    lambda d: d["params"].update(bias="x"),
])
def test_malformed_documents_are_corrupt(models, mutate):
    doc = json.loads(dumps_model(models["svm"]))
    mutate(doc)
    with pytest.raises(CorruptModel):
        loads_model(json.dumps(doc))


def test_bad_tree_node_is_corrupt(models):
    doc = json.loads(dumps_model(models["tree"]))
    doc["params"]["nodes"][0][2] = 999
    with pytest.raises(CorruptModel):
        loads_model(json.dumps(doc))


def test_binary_garbage_is_corrupt():
    with pytest.raises(CorruptModel):
        load_model(io.BytesIO(b"\xff\xfe\x00garbage"))
