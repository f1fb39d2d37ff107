"""Command-line entry point: ``ddosdetect {synth,train,evaluate,bench,inspect}``.

Data goes to stdout (and to CSV files when ``--out`` is given); every
diagnostic, including wall-clock timings, goes to stderr. Exit status is
0 on success, 1 on any data/model error and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import pipeline
from .classifiers import DISPLAY_NAMES, Hyperparams, LogisticParams, SvmParams, TreeParams
from .classifiers import load_model, save_model
from .errors import DdosError, MissingColumn, ModelDataMismatch
from .evaluate import confusion_text, report_csv, report_text, scoreboard
from .flow_data import NUMERIC_FIELDS, Label, Schema, read_flow_csv, summarize, write_flow_csv
from .preprocess import DEFAULT_FEATURES, SplitConfig
from .synth import SynthConfig, generate


# ---------------------------------------------------------------------------
# argument types

def _fraction(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("must be strictly between 0 and 1")
    return value


def _features(text):
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    if not names:
        raise argparse.ArgumentTypeError("give at least one feature name")
    return names


def _depth(text):
    if text.lower() in ("none", "unlimited"):
        return None
    return int(text)


def _add_data_args(p, required=True):
    p.add_argument("--data", required=required, type=Path, help="flow CSV file")
    p.add_argument("--schema", type=Path, help="key=value file mapping record fields to CSV headers")
    p.add_argument("--skip-bad-rows", action="store_true",
                   help="skip malformed rows (reported on stderr) instead of failing")


def _add_split_args(p):
    p.add_argument("--features", type=_features, default=DEFAULT_FEATURES,
                   help=f"comma-separated feature list (default: {','.join(DEFAULT_FEATURES)}; "
                        f"choose from {','.join(NUMERIC_FIELDS)})")
    p.add_argument("--test-fraction", type=_fraction, default=0.2)
    p.add_argument("--seed", type=int, default=42, help="split seed, also seeds the SVM")
    p.add_argument("--no-stratify", dest="stratified", action="store_false")


def _add_hyper_args(p):
    d = Hyperparams()
    p.add_argument("--lr", type=float, default=d.logistic.learning_rate, help="logistic learning rate")
    p.add_argument("--iters", type=int, default=d.logistic.iterations, help="logistic iterations")
    p.add_argument("--l2", type=float, default=d.logistic.l2, help="logistic L2 penalty")
    p.add_argument("--lambda", dest="lam", type=float, default=d.svm.lam, help="SVM regularization")
    p.add_argument("--epochs", type=int, default=d.svm.epochs, help="SVM passes over the data")
    p.add_argument("--max-depth", type=_depth, default=d.tree.max_depth,
                   help="tree depth limit ('none' for unlimited)")
    p.add_argument("--min-samples-split", type=int, default=d.tree.min_samples_split)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddosdetect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic labeled flow CSV")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--n-benign", type=int, default=None)
    p.add_argument("--n-ddos", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--overlap", type=float, default=None)
    p.add_argument("--config", type=Path, help="key=value generator config file")

    p = sub.add_parser("train", help="train one classifier and save it")
    _add_data_args(p)
    _add_split_args(p)
    _add_hyper_args(p)
    p.add_argument("--classifier", choices=sorted(DISPLAY_NAMES), default="svm")
    p.add_argument("--model", required=True, type=Path, help="output model file")

    p = sub.add_parser("evaluate", help="score a saved model on a flow CSV")
    _add_data_args(p)
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--subset", choices=("all", "test", "train"), default="all",
                   help="'test'/'train' re-derive the split recorded in the model")
    p.add_argument("--out", type=Path, help="write the metrics row as CSV")

    p = sub.add_parser("bench", help="train and compare all three classifiers")
    _add_data_args(p)
    _add_split_args(p)
    _add_hyper_args(p)
    p.add_argument("--out", type=Path, help="write the scoreboard CSV")

    p = sub.add_parser("inspect", help="per-class summary statistics of a flow CSV")
    _add_data_args(p)
    return parser


# ---------------------------------------------------------------------------
# helpers

def _load_dataset(args):
    schema = Schema.from_text(args.schema.read_text(encoding="utf-8")) if args.schema else None
    ds = read_flow_csv(args.data, schema, on_error="report" if args.skip_bad_rows else "raise")
    for err in ds.rejected:
        print(f"warning: skipped {err}", file=sys.stderr)
    if ds.rejected:
        print(f"warning: {len(ds.rejected)} malformed rows skipped", file=sys.stderr)
    return ds


def _hyperparams(args) -> Hyperparams:
    return Hyperparams(
        logistic=LogisticParams(args.lr, args.iters, args.l2),
        svm=SvmParams(args.lam, args.epochs, args.seed),
        tree=TreeParams(args.max_depth, args.min_samples_split),
    )


def _prepare(args):
    ds = _load_dataset(args)
    split = SplitConfig(args.test_fraction, args.seed, args.stratified)
    prep = pipeline.prepare(ds, args.features, split)
    if prep.removed:
        print(f"warning: removed {prep.removed} records with non-finite values", file=sys.stderr)
    return prep


def _fmt(value):
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else "undefined"
    return f"{value:.6g}" if isinstance(value, float) else str(value)


# ---------------------------------------------------------------------------
# commands

def cmd_synth(args, out):
    cfg = SynthConfig()
    if args.config:
        cfg = SynthConfig.from_text(args.config.read_text(encoding="utf-8"), cfg)
    overrides = {k: v for k, v in (("n_benign", args.n_benign), ("n_ddos", args.n_ddos),
                                    ("seed", args.seed), ("overlap", args.overlap)) if v is not None}
    cfg = replace(cfg, **overrides)
    ds = generate(cfg)
    write_flow_csv(ds, args.out)
    counts = ds.class_counts()
    out.write(f"wrote {len(ds)} records to {args.out} "
              f"(BENIGN={counts[Label.BENIGN]}, DDoS={counts[Label.DDOS]}, seed={cfg.seed})\n")
    out.write(_summary_text(ds))


def cmd_train(args, out):
    prep = _prepare(args)
    model = pipeline.fit(args.classifier, prep, _hyperparams(args))
    save_model(model, args.model)
    counts = prep.matrix.class_counts()
    out.write(
        f"classifier:      {DISPLAY_NAMES[args.classifier]}\n"
        f"records:         {len(prep.dataset)} (BENIGN={counts[Label.BENIGN]}, DDoS={counts[Label.DDOS]})\n"
        f"features:        {','.join(prep.matrix.feature_names)}\n"
        f"split:           train={prep.train.n} test={prep.test.n} seed={prep.split.seed} "
        f"test_fraction={prep.split.test_fraction} stratified={prep.split.stratified}\n"
        f"train accuracy:  {pipeline.accuracy(model, prep.train):.6f}\n"
        f"test accuracy:   {pipeline.accuracy(model, prep.test):.6f}\n"
        f"model written:   {args.model}\n"
    )


def cmd_evaluate(args, out):
    model = load_model(args.model)
    try:
        ds = _load_dataset(args)
    except MissingColumn as err:
        if err.field in model.feature_names or err.field == "label":
            raise ModelDataMismatch(f"dataset lacks column {err.name!r} needed by the model") from None
        raise
    report = pipeline.score(model, pipeline.model_matrix(model, ds, args.subset))
    out.write(f"subset: {args.subset}\n")
    out.write(report_text(report))
    if args.out:
        args.out.write_text(report_csv(report), encoding="utf-8")


def cmd_bench(args, out):
    prep = _prepare(args)
    result = pipeline.bench(prep, _hyperparams(args))
    text, csv_text = scoreboard(result.reports)
    out.write(f"train={prep.train.n} test={prep.test.n} seed={prep.split.seed} "
              f"features={','.join(prep.matrix.feature_names)}\n\n")
    out.write(text)
    for report in result.reports:
        out.write(f"\n{report.classifier}\n")
        out.write(confusion_text(report.confusion))
    for kind, ms in result.train_ms.items():
        print(f"train time {DISPLAY_NAMES[kind]}: {ms:.1f} ms", file=sys.stderr)
    if args.out:
        args.out.write_text(csv_text, encoding="utf-8")


def _summary_text(ds) -> str:
    stats = summarize(ds)
    lines = []
    for lab in stats.classes:
        lines.append(f"[{lab.text}] n={stats.counts[lab]}")
        lines.append(f"  {'feature':<18}{'mean':>14}{'std':>14}{'min':>12}{'max':>12}")
        for name in NUMERIC_FIELDS:
            s = stats.features[lab][name]
            lines.append(f"  {name:<18}{s.mean:>14.3f}{s.std:>14.3f}{s.min:>12.0f}{s.max:>12.0f}")
    if len(stats.classes) == 2:
        lines.append("variance ratio BENIGN/DDoS")
        for name in NUMERIC_FIELDS:
            lines.append(f"  {name:<18}{_fmt(stats.variance_ratio(name)):>14}")
    return "\n".join(lines) + "\n"


def cmd_inspect(args, out):
    ds = _load_dataset(args)
    counts = ds.class_counts()
    present = sum(1 for c in counts.values() if c)
    out.write(f"source: {ds.source_name}\n")
    out.write(f"records: {len(ds)}  columns: {len(NUMERIC_FIELDS) + 1}  classes: {present}\n")
    out.write(_summary_text(ds))


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
    "inspect": cmd_inspect,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args, out)
    except (DdosError, OSError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
