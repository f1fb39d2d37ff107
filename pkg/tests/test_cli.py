import io
import json
from pathlib import Path

import pytest

from ddosdetect import synth
from ddosdetect.cli import main
from ddosdetect.flow_data import Dataset, FlowRecord, Label, write_flow_csv

GOLDEN = Path(__file__).parent / "golden"
SEP_FEATURES = ",".join(synth.SEPARABLE_FLOW_FEATURES)


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def synth_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "synth.csv"
    assert run("synth", "--out", path, "--n-benign", 400, "--n-ddos", 400, "--seed", 7)[0] == 0
    return path


@pytest.fixture(scope="module")
def separable_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "separable.csv"
    write_flow_csv(synth.separable_flow_dataset(100, 2.0, 0), path)
    return path


def test_synth_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("synth", "--out", a, "--n-benign", 50, "--n-ddos", 30, "--seed", 3)
    code, text = run("synth", "--out", b, "--n-benign", 50, "--n-ddos", 30, "--seed", 3)
    assert code == 0 and a.read_bytes() == b.read_bytes()
    assert "BENIGN=50, DDoS=30" in text


def test_synth_row_count(tmp_path):
    path = tmp_path / "d.csv"
    run("synth", "--n-benign", 500, "--n-ddos", 500, "--seed", 7, "--out", path)
    assert len(path.read_text().splitlines()) == 1 + 1000


def test_synth_requires_out():
    with pytest.raises(SystemExit) as exc:
        run("synth", "--n-benign", 5)
    assert exc.value.code == 2


def test_synth_negative_count(tmp_path, capsys):
    code, _ = run("synth", "--out", tmp_path / "x.csv", "--n-benign", -1)
    assert code == 1
    assert "InvalidConfig" in capsys.readouterr().err


def test_synth_config_file(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("n_benign = 5\nn_ddos = 6\n")
    code, text = run("synth", "--out", tmp_path / "x.csv", "--config", cfg, "--n-ddos", 7)
    assert code == 0 and "BENIGN=5, DDoS=7" in text


def test_train_svm_separable(tmp_path, separable_csv):
    model = tmp_path / "svm.json"
    code, text = run("train", "--data", separable_csv, "--classifier", "svm",
                     "--features", SEP_FEATURES, "--model", model)
    assert code == 0
    assert "train accuracy:  1.000000" in text
    doc = json.loads(model.read_text())
    assert doc["kind"] == "svm" and doc["feature_names"] == list(synth.SEPARABLE_FLOW_FEATURES)


def test_train_header_only(tmp_path, capsys):
    data = tmp_path / "empty.csv"
    write_flow_csv(Dataset((FlowRecord(80, 1, 1, 1, 1, 1, 1, 1, Label.DDOS),)), data)
    data.write_text(data.read_text().splitlines()[0] + "\n")
    code, _ = run("train", "--data", data, "--model", tmp_path / "m.json")
    assert code == 1
    assert "EmptyDataset" in capsys.readouterr().err


def test_train_single_class(tmp_path, capsys):
    data = tmp_path / "one.csv"
    run("synth", "--out", data, "--n-benign", 0, "--n-ddos", 40)
    code, _ = run("train", "--data", data, "--classifier", "logistic", "--model", tmp_path / "m.json")
    assert code == 1
    assert "SingleClass" in capsys.readouterr().err


def test_train_unknown_feature_exit_one(tmp_path, separable_csv):
    code, _ = run("train", "--data", separable_csv, "--features", "nope", "--model", tmp_path / "m.json")
    assert code == 1


def test_evaluate_perfect_fit(tmp_path, separable_csv):
    model = tmp_path / "tree.json"
    run("train", "--data", separable_csv, "--classifier", "tree", "--features", SEP_FEATURES,
        "--model", model)
    code, text = run("evaluate", "--data", separable_csv, "--model", model)
    assert code == 0
    assert "accuracy  1.000000" in text


def test_evaluate_missing_feature_column(tmp_path, separable_csv, capsys):
    model = tmp_path / "svm.json"
    run("train", "--data", separable_csv, "--features", SEP_FEATURES, "--model", model)
    lines = separable_csv.read_text().splitlines()
    header = lines[0].split(",")
    drop = header.index("Total Length of Bwd Pkts")
    stripped = tmp_path / "stripped.csv"
    stripped.write_text("\n".join(",".join(c for i, c in enumerate(l.split(",")) if i != drop)
                                  for l in lines) + "\n")
    code, _ = run("evaluate", "--data", stripped, "--model", model)
    assert code == 1
    assert "ModelDataMismatch" in capsys.readouterr().err


def test_evaluate_corrupt_model(tmp_path, separable_csv, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "ddosdetect-model", "ver')
    assert run("evaluate", "--data", separable_csv, "--model", bad)[0] == 1
    assert "CorruptModel" in capsys.readouterr().err


def test_evaluate_golden(tmp_path, synth_csv):
    model = tmp_path / "svm.json"
    run("train", "--data", synth_csv, "--classifier", "svm", "--model", model)
    out_csv = tmp_path / "metrics.csv"
    code, text = run("evaluate", "--data", synth_csv, "--model", model, "--subset", "test",
                     "--out", out_csv)
    assert code == 0
    assert text == (GOLDEN / "evaluate_svm_test.txt").read_text()
    assert out_csv.read_text() == (GOLDEN / "evaluate_svm_test.csv").read_text()


def test_bench_separable(tmp_path, separable_csv):
    out_csv = tmp_path / "board.csv"
    code, text = run("bench", "--data", separable_csv, "--features", SEP_FEATURES, "--out", out_csv)
    assert code == 0
    rows = [line.split(",") for line in out_csv.read_text().splitlines()[1:]]
    assert len(rows) == 3
    assert all(float(r[1]) >= 0.99 for r in rows)
    assert "Method" in text and "pred DDoS" in text


def test_bench_equals_train_then_evaluate(tmp_path, synth_csv):
    board = tmp_path / "board.csv"
    run("bench", "--data", synth_csv, "--seed", 5, "--out", board)
    bench_rows = {r.split(",")[0]: r for r in board.read_text().splitlines()[1:]}
    for kind in ("logistic", "svm", "tree"):
        model, metrics = tmp_path / f"{kind}.json", tmp_path / f"{kind}.csv"
        run("train", "--data", synth_csv, "--seed", 5, "--classifier", kind, "--model", model)
        run("evaluate", "--data", synth_csv, "--model", model, "--subset", "test", "--out", metrics)
        row = metrics.read_text().splitlines()[1]
        assert bench_rows[row.split(",")[0]] == row


def test_bench_timings_on_stderr(synth_csv, capsys):
    code, text = run("bench", "--data", synth_csv)
    err = capsys.readouterr().err
    assert code == 0 and "train time" in err and "train time" not in text


def test_inspect_sample_flows(tmp_path, sample_bytes):
    data = tmp_path / "t.csv"
    data.write_bytes(sample_bytes)
    code, text = run("inspect", "--data", data)
    assert code == 0
    assert "records: 5  columns: 9  classes: 2" in text
    assert "variance ratio BENIGN/DDoS" in text


def test_inspect_empty_file(tmp_path, capsys):
    data = tmp_path / "e.csv"
    data.write_bytes(b"")
    assert run("inspect", "--data", data)[0] == 1
    assert "EmptyDataset" in capsys.readouterr().err


def test_missing_data_file(tmp_path):
    assert run("inspect", "--data", tmp_path / "nope.csv")[0] == 1


def test_skip_bad_rows(tmp_path, sample_bytes, capsys):
    data = tmp_path / "t.csv"
    data.write_bytes(sample_bytes + b"80,abc,1,1,1,1,1,1,DDoS\n")
    assert run("inspect", "--data", data)[0] == 1
    code, text = run("inspect", "--data", data, "--skip-bad-rows")
    assert code == 0 and "records: 5" in text
    assert "1 malformed rows skipped" in capsys.readouterr().err
