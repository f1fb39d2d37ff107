"""Flow records and CICFlowMeter-style CSV ingestion.

A :class:`Dataset` is an immutable, ordered collection of
:class:`FlowRecord` rows. Only the nine columns below are read from a
CSV; any extra columns (real CIC exports carry ~80) are ignored.

    Destination, Flow Duration, Total Fwd Pkts, Total Bwd Pkts,
    Total Length of Fwd Pkts, Total Length of Bwd Pkts,
    Initial Window bytes Fwd, Initial Window bytes Bwd, Label
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Mapping

import numpy as np

from .errors import EmptyDataset, InvalidConfig, InvalidRecord, MissingColumn, ParseError


class Label(enum.IntEnum):
    """Ground-truth class of a flow. The integer value is the model target."""

    BENIGN = 0
    DDOS = 1

    @classmethod
    def parse(cls, text: str) -> "Label":
        key = text.strip().casefold()
        if key == "benign":
            return cls.BENIGN
        if key == "ddos":
            return cls.DDOS
        raise ValueError(f"unknown label {text!r}")

    @property
    def text(self) -> str:
        return "BENIGN" if self is Label.BENIGN else "DDoS"


# field name -> (lower bound, upper bound)
_BOUNDS = {
    "destination_port": (0, 65535),
    "flow_duration": (0, None),
    "total_fwd_pkts": (0, None),
    "total_bwd_pkts": (0, None),
    "total_len_fwd": (0, None),
    "total_len_bwd": (0, None),
    "init_win_fwd": (-1, None),
    "init_win_bwd": (-1, None),
}

NUMERIC_FIELDS: tuple[str, ...] = tuple(_BOUNDS)


@dataclass(frozen=True, slots=True)
class FlowRecord:
    destination_port: int
    flow_duration: int
    total_fwd_pkts: int
    total_bwd_pkts: int
    total_len_fwd: int
    total_len_bwd: int
    init_win_fwd: int
    init_win_bwd: int
    label: Label

    def __post_init__(self):
        for name in NUMERIC_FIELDS:
            problem = _range_problem(name, getattr(self, name))
            if problem:
                raise InvalidRecord(f"{name}: {problem}")
        if not isinstance(self.label, Label):
            raise InvalidRecord(f"label must be a Label, got {self.label!r}")

    def values(self) -> tuple:
        return tuple(getattr(self, name) for name in NUMERIC_FIELDS)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.values())


def _range_problem(name, value):
    # NaN/inf pass through on purpose; clean() is the step that removes them.
    lo, hi = _BOUNDS[name]
    if value < lo:
        return f"{value} is below the minimum {lo}"
    if hi is not None and value > hi:
        return f"{value} is above the maximum {hi}"
    return None


@dataclass(frozen=True)
class Dataset:
    records: tuple[FlowRecord, ...]
    source_name: str = "<memory>"
    # rows skipped by parse_flow_csv(on_error="report"); never silently lost
    rejected: tuple[ParseError, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "rejected", tuple(self.rejected))

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def column(self, name: str) -> np.ndarray:
        if name not in _BOUNDS:
            raise KeyError(name)
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)

    def labels(self) -> np.ndarray:
        return np.array([int(r.label) for r in self.records], dtype=np.int8)

    def class_counts(self) -> dict[Label, int]:
        y = self.labels()
        return {lab: int(np.sum(y == lab)) for lab in Label}


# ---------------------------------------------------------------------------
# schema

CSV_HEADERS = {
    "destination_port": "Destination",
    "flow_duration": "Flow Duration",
    "total_fwd_pkts": "Total Fwd Pkts",
    "total_bwd_pkts": "Total Bwd Pkts",
    "total_len_fwd": "Total Length of Fwd Pkts",
    "total_len_bwd": "Total Length of Bwd Pkts",
    "init_win_fwd": "Initial Window bytes Fwd",
    "init_win_bwd": "Initial Window bytes Bwd",
    "label": "Label",
}

# Header spellings used by CICIDS2017 exports and by CICFlowMeter-V4.
_CIC_ALIASES = {
    "destination_port": ("Destination Port", "Dst Port"),
    "flow_duration": (),
    "total_fwd_pkts": ("Total Fwd Packets", "Tot Fwd Pkts"),
    "total_bwd_pkts": ("Total Backward Packets", "Tot Bwd Pkts"),
    "total_len_fwd": ("Total Length of Fwd Packets", "TotLen Fwd Pkts"),
    "total_len_bwd": ("Total Length of Bwd Packets", "TotLen Bwd Pkts"),
    "init_win_fwd": ("Init_Win_bytes_forward", "Init Fwd Win Byts"),
    "init_win_bwd": ("Init_Win_bytes_backward", "Init Bwd Win Byts"),
    "label": (),
}


def _norm(name: str) -> str:
    return name.strip().casefold()


@dataclass(frozen=True)
class Schema:
    """Maps each record field to the header names accepted for it.

    Matching is case-insensitive and ignores surrounding whitespace;
    aliases are tried in order. Writing always uses ``CSV_HEADERS``.
    """

    aliases: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        missing = [f for f in CSV_HEADERS if f not in self.aliases]
        if missing:
            raise InvalidConfig(f"schema lacks fields: {missing}")

    @classmethod
    def default(cls) -> "Schema":
        return cls({f: (CSV_HEADERS[f],) + _CIC_ALIASES[f] for f in CSV_HEADERS})

    def with_overrides(self, mapping: Mapping[str, str]) -> "Schema":
        """Return a schema where ``mapping[field]`` is tried before the existing aliases."""
        merged = dict(self.aliases)
        for fname, header in mapping.items():
            if fname not in CSV_HEADERS:
                raise InvalidConfig(f"unknown schema field {fname!r}")
            merged[fname] = (header,) + tuple(a for a in merged[fname] if a != header)
        return Schema(merged)

    @classmethod
    def from_text(cls, text: str) -> "Schema":
        """Parse ``field = Header Name`` lines on top of the default schema."""
        mapping = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidConfig(f"schema line {lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            mapping[key] = value
        return cls.default().with_overrides(mapping)

    def locate(self, header: list[str]) -> dict[str, int]:
        """Column index of every field in ``header``; raises MissingColumn."""
        positions: dict[str, int] = {}
        for i, name in enumerate(header):
            positions.setdefault(_norm(name), i)
        found = {}
        for fname, names in self.aliases.items():
            for alias in names:
                if _norm(alias) in positions:
                    found[fname] = positions[_norm(alias)]
                    break
            else:
                raise MissingColumn(names[0], fname)
        return found


# ---------------------------------------------------------------------------
# parsing

def _parse_number(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    value = float(text)  # ValueError propagates to the caller
    if not math.isfinite(value):
        return value
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def parse_flow_csv(
    source: BinaryIO | bytes,
    schema: Schema | None = None,
    *,
    source_name: str | None = None,
    on_error: str = "raise",
) -> Dataset:
    """Read a flow CSV from a UTF-8 byte stream.

    With ``on_error="raise"`` the first malformed row raises
    :class:`ParseError`. With ``on_error="report"`` malformed rows are
    skipped and recorded in ``Dataset.rejected`` instead.

    Text values ``NaN``/``Infinity`` are accepted as non-finite numbers so
    that :func:`ddosdetect.preprocess.clean` can drop them explicitly.
    """
    if on_error not in ("raise", "report"):
        raise ValueError("on_error must be 'raise' or 'report'")
    schema = schema or Schema.default()
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    if source_name is None:
        source_name = getattr(source, "name", "<stream>")
    text = io.TextIOWrapper(source, encoding="utf-8-sig", newline="")
    reader = csv.reader(text)

    try:
        header = next(reader, None)
        while header is not None and not header:
            header = next(reader, None)
        if header is None:
            raise EmptyDataset()
        cols = schema.locate(header)

        records = []
        rejected = []
        row_no = 0
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            row_no += 1
            try:
                records.append(_row_to_record(row, row_no, cols, header))
            except ParseError as err:
                if on_error == "raise":
                    raise
                rejected.append(err)
    except UnicodeDecodeError as err:
        raise ParseError(None, None, f"input is not valid UTF-8 ({err.reason})") from None
    finally:
        text.detach()

    if not records and not rejected:
        raise EmptyDataset()
    if not records:
        raise ParseError(rejected[0].row, rejected[0].column,
                         f"every data row is malformed; first: {rejected[0].message}")
    return Dataset(tuple(records), str(source_name), tuple(rejected))


def _row_to_record(row, row_no, cols, header):
    if len(row) < len(header):
        raise ParseError(row_no, None, f"expected {len(header)} fields, found {len(row)}")
    values = {}
    for fname, idx in cols.items():
        raw = row[idx]
        if fname == "label":
            try:
                values[fname] = Label.parse(raw)
            except ValueError:
                raise ParseError(row_no, header[idx].strip(), f"unknown label {raw!r}") from None
            continue
        try:
            value = _parse_number(raw)
        except ValueError:
            raise ParseError(row_no, header[idx].strip(), f"not a number: {raw!r}") from None
        problem = _range_problem(fname, value)
        if problem:
            raise ParseError(row_no, header[idx].strip(), problem)
        values[fname] = value
    return FlowRecord(**values)


def read_flow_csv(path, schema: Schema | None = None, *, on_error: str = "raise") -> Dataset:
    path = Path(path)
    with path.open("rb") as fh:
        return parse_flow_csv(fh, schema, source_name=str(path), on_error=on_error)


def _format_number(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        if value == int(value):
            return str(int(value))
    return str(value)


def write_flow_csv(ds: Dataset | Iterable[FlowRecord], sink) -> None:
    """Write records as the nine canonical columns to a text sink (or path)."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", newline="", encoding="utf-8") as fh:
            write_flow_csv(ds, fh)
        return
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_HEADERS.values())
    for rec in ds:
        writer.writerow([_format_number(v) for v in rec.values()] + [rec.label.text])


def dumps_flow_csv(ds: Dataset | Iterable[FlowRecord]) -> bytes:
    buf = io.StringIO()
    write_flow_csv(ds, buf)
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# summaries

@dataclass(frozen=True)
class FeatureStats:
    mean: float
    std: float
    min: float
    max: float

    @property
    def var(self) -> float:
        return self.std * self.std


@dataclass(frozen=True)
class SummaryStats:
    """Per-class, per-feature summary. ``std`` uses the population (divide-by-n) convention."""

    counts: dict[Label, int]
    features: dict[Label, dict[str, FeatureStats]]

    @property
    def classes(self) -> list[Label]:
        return sorted(self.features)

    def variance_ratio(self, name: str) -> float:
        """Benign variance over DDoS variance; ``inf`` for constant attack values, NaN if undefined."""
        try:
            benign = self.features[Label.BENIGN][name].var
            attack = self.features[Label.DDOS][name].var
        except KeyError:
            return math.nan
        if attack == 0.0:
            return math.inf if benign > 0.0 else math.nan
        return benign / attack


def summarize(ds: Dataset) -> SummaryStats:
    if len(ds) == 0:
        raise EmptyDataset()
    y = ds.labels()
    matrix = np.array([r.values() for r in ds.records], dtype=np.float64)
    counts = {}
    per_class = {}
    for lab in Label:
        mask = y == lab
        if not mask.any():
            continue
        counts[lab] = int(mask.sum())
        sub = matrix[mask]
        stats = {}
        for j, name in enumerate(NUMERIC_FIELDS):
            col = sub[:, j]
            lo, hi = float(col.min()), float(col.max())
            # mean is clamped so float rounding can never put it outside [min, max]
            mean = min(max(float(col.mean()), lo), hi)
            stats[name] = FeatureStats(mean, float(col.std(ddof=0)), lo, hi)
        per_class[lab] = stats
    return SummaryStats(counts, per_class)


__all__ = [
    "Dataset", "FeatureStats", "FlowRecord", "Label", "NUMERIC_FIELDS", "Schema",
    "SummaryStats", "CSV_HEADERS", "dumps_flow_csv", "parse_flow_csv",
    "read_flow_csv", "summarize", "write_flow_csv",
]
