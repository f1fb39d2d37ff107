"""Confusion matrices, detection metrics and the comparison scoreboard.

DDoS is the positive class. Precision, recall and F1 are computed per
class and combined with a support-weighted average; the per-class values
stay available on :class:`EvalReport`. Any metric whose denominator is
zero is ``None`` ("undefined") rather than a silent 0.

Arithmetic is done on exact fractions and rounded once, so every reported
value is the correctly rounded float of its rational definition.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EmptyInput, LengthMismatch, NoAttackSamples, NoBenignSamples
from .flow_data import Label

UNDEFINED = "undefined"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts named <true class>_<predicted class>."""

    benign_benign: int
    benign_ddos: int
    ddos_benign: int
    ddos_ddos: int

    def __post_init__(self):
        for name in ("benign_benign", "benign_ddos", "ddos_benign", "ddos_ddos"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.benign_benign + self.benign_ddos + self.ddos_benign + self.ddos_ddos

    @property
    def n_benign(self) -> int:
        return self.benign_benign + self.benign_ddos

    @property
    def n_ddos(self) -> int:
        return self.ddos_benign + self.ddos_ddos

    def as_array(self) -> np.ndarray:
        """2x2 array, rows = truth (BENIGN, DDoS), columns = prediction."""
        return np.array([[self.benign_benign, self.benign_ddos],
                         [self.ddos_benign, self.ddos_ddos]], dtype=np.int64)


def _codes(labels) -> np.ndarray:
    arr = np.asarray([int(v) for v in labels] if not isinstance(labels, np.ndarray) else labels)
    arr = arr.astype(np.int64, copy=False).reshape(-1)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("labels must be BENIGN/DDoS (codes 0/1)")
    return arr


def confusion(truth: Sequence[Label], pred: Sequence[Label]) -> ConfusionMatrix:
    t = _codes(truth)
    p = _codes(pred)
    if t.shape != p.shape:
        raise LengthMismatch(f"{t.size} true labels vs {p.size} predictions")
    if t.size == 0:
        raise EmptyInput("no predictions to score")
    bb, bd, db, dd = np.bincount(2 * t + p, minlength=4).tolist()
    return ConfusionMatrix(bb, bd, db, dd)


def fp_rate(cm: ConfusionMatrix) -> float:
    """Share of benign flows flagged as DDoS."""
    if cm.n_benign == 0:
        raise NoBenignSamples()
    return cm.benign_ddos / cm.n_benign


def fn_rate(cm: ConfusionMatrix) -> float:
    """Share of DDoS flows classified as benign."""
    if cm.n_ddos == 0:
        raise NoAttackSamples()
    return cm.ddos_benign / cm.n_ddos


def _ratio(num, den):
    return Fraction(num, den) if den else None


def _f1(p, r):
    if p is None or r is None:
        return None
    if p + r == 0:
        return Fraction(0)
    return 2 * p * r / (p + r)


def _float(q):
    return None if q is None else float(q)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float | None
    recall: float | None
    f1: float | None
    support: int


@dataclass(frozen=True)
class EvalReport:
    classifier: str
    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None
    fp: float | None
    fn: float | None
    confusion: ConfusionMatrix | None = None
    per_class: dict[Label, ClassMetrics] = field(default_factory=dict)

    COLUMNS = ("accuracy", "precision", "recall", "f1", "fp", "fn")

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in self.COLUMNS)


def _exact_per_class(cm: ConfusionMatrix) -> dict[Label, tuple]:
    a = cm.as_array()
    out = {}
    for c in Label:
        tp = int(a[c, c])
        support = int(a[c, :].sum())
        p = _ratio(tp, int(a[:, c].sum()))
        r = _ratio(tp, support)
        out[c] = (p, r, _f1(p, r), support)
    return out


def per_class_metrics(cm: ConfusionMatrix) -> dict[Label, ClassMetrics]:
    return {c: ClassMetrics(_float(p), _float(r), _float(f), s)
            for c, (p, r, f, s) in _exact_per_class(cm).items()}


def _weighted(exact, pos, total):
    acc = Fraction(0)
    for values in exact.values():
        support = values[3]
        if support == 0:
            continue
        if values[pos] is None:
            return None
        acc += support * values[pos]
    return float(acc / total)


def metrics(cm: ConfusionMatrix, classifier: str = "") -> EvalReport:
    total = cm.total
    if total == 0:
        raise EmptyInput("confusion matrix is empty")
    exact = _exact_per_class(cm)
    try:
        fp = fp_rate(cm)
    except NoBenignSamples:
        fp = None
    try:
        fn = fn_rate(cm)
    except NoAttackSamples:
        fn = None
    return EvalReport(
        classifier=classifier,
        accuracy=(cm.benign_benign + cm.ddos_ddos) / total,
        precision=_weighted(exact, 0, total),
        recall=_weighted(exact, 1, total),
        f1=_weighted(exact, 2, total),
        fp=fp,
        fn=fn,
        confusion=cm,
        per_class=per_class_metrics(cm),
    )


def evaluate_predictions(truth, pred, classifier: str = "") -> EvalReport:
    return metrics(confusion(truth, pred), classifier)


# ---------------------------------------------------------------------------
# scoreboard

def _fmt(value, digits):
    return UNDEFINED if value is None else f"{value:.{digits}f}"


def rank(reports: Sequence[EvalReport]) -> list[EvalReport]:
    """Accuracy descending; equal accuracies fall back to classifier name."""
    return sorted(reports, key=lambda r: (-r.accuracy, r.classifier))


def scoreboard_csv(reports: Sequence[EvalReport]) -> str:
    if not reports:
        raise EmptyInput("scoreboard needs at least one report")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("classifier",) + EvalReport.COLUMNS)
    for r in rank(reports):
        writer.writerow([r.classifier] + [_fmt(v, 6) for v in r.values()])
    return buf.getvalue()


def scoreboard_text(reports: Sequence[EvalReport], digits: int = 3) -> str:
    if not reports:
        raise EmptyInput("scoreboard needs at least one report")
    header = ["Method", "Accu.", "Precision", "Recall", "F1-Score", "FP", "FN"]
    rows = [[r.classifier] + [_fmt(v, digits) for v in r.values()] for r in rank(reports)]
    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]
    lines = []
    for row in [header] + rows:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def scoreboard(reports: Sequence[EvalReport]) -> tuple[str, str]:
    """(aligned text table, CSV) for the given reports."""
    return scoreboard_text(reports), scoreboard_csv(reports)


def confusion_text(cm: ConfusionMatrix) -> str:
    width = max(6, len(str(cm.total)))
    return (
        f"{'':>14}{'pred BENIGN':>{width + 6}}{'pred DDoS':>{width + 6}}\n"
        f"{'true BENIGN':<14}{cm.benign_benign:>{width + 6}}{cm.benign_ddos:>{width + 6}}\n"
        f"{'true DDoS':<14}{cm.ddos_benign:>{width + 6}}{cm.ddos_ddos:>{width + 6}}\n"
    )


def report_text(report: EvalReport) -> str:
    lines = [f"classifier: {report.classifier}"]
    if report.confusion is not None:
        lines.append(confusion_text(report.confusion).rstrip("\n"))
    for name in EvalReport.COLUMNS:
        lines.append(f"{name:<10}{_fmt(getattr(report, name), 6)}")
    for lab, m in sorted(report.per_class.items()):
        lines.append(f"  {lab.text:<7} precision={_fmt(m.precision, 6)} recall={_fmt(m.recall, 6)} "
                     f"f1={_fmt(m.f1, 6)} support={m.support}")
    return "\n".join(lines) + "\n"


def report_csv(report: EvalReport) -> str:
    return scoreboard_csv([report])
