"""Synthetic labeled flows with low-variance attacks and high-variance benign traffic.

Attack rows cluster tightly around fixed values (a flood repeats nearly
the same request), benign rows are spread widely. Every numeric feature
is drawn from a normal distribution, clamped at its lower bound and
rounded to an integer. The defaults are fixture choices loosely based on
the sample rows in the CIC flow tables, not fitted statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .errors import InvalidConfig
from .flow_data import NUMERIC_FIELDS, Dataset, FlowRecord, Label
from .preprocess import FeatureMatrix


@dataclass(frozen=True)
class FeatureSpec:
    benign_loc: float
    benign_spread: float
    ddos_loc: float
    ddos_spread: float


DEFAULT_SPECS: dict[str, FeatureSpec] = {
    "flow_duration": FeatureSpec(1_500_000, 2_000_000, 80_000, 50_000),
    "total_fwd_pkts": FeatureSpec(12, 10, 4, 1),
    "total_bwd_pkts": FeatureSpec(14, 12, 5, 1),
    "total_len_fwd": FeatureSpec(900, 1000, 40, 20),
    "total_len_bwd": FeatureSpec(9000, 8000, 11604, 200),
    "init_win_fwd": FeatureSpec(16000, 12000, 8192, 256),
    "init_win_bwd": FeatureSpec(1000, 800, 229, 20),
}

_LOWER = {name: (-1 if name.startswith("init_win") else 0) for name in DEFAULT_SPECS}
_SPEC_KEYS = ("benign_loc", "benign_spread", "ddos_loc", "ddos_spread")


@dataclass(frozen=True)
class SynthConfig:
    """``overlap`` slides every attack location toward the benign one (0 = apart, 1 = same)."""

    n_benign: int = 1000
    n_ddos: int = 1000
    seed: int = 7
    overlap: float = 0.0
    specs: Mapping[str, FeatureSpec] = field(default_factory=lambda: dict(DEFAULT_SPECS))
    benign_ports: tuple[int, ...] = (53, 80, 443, 445, 22, 8080, 3389, 123)
    ddos_port: int = 80
    shuffle: bool = True

    def validate(self) -> None:
        for name in ("n_benign", "n_ddos"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise InvalidConfig(f"{name} must be a non-negative integer, got {value!r}")
        if self.n_benign + self.n_ddos == 0:
            raise InvalidConfig("n_benign + n_ddos must be > 0")
        if not 0.0 <= self.overlap <= 1.0:
            raise InvalidConfig(f"overlap must be in [0, 1], got {self.overlap}")
        if set(self.specs) != set(DEFAULT_SPECS):
            raise InvalidConfig(f"specs must cover exactly {sorted(DEFAULT_SPECS)}")
        for name, spec in self.specs.items():
            for key in _SPEC_KEYS:
                if not math.isfinite(getattr(spec, key)):
                    raise InvalidConfig(f"{name}.{key} must be finite")
            if spec.benign_spread < 0 or spec.ddos_spread < 0:
                raise InvalidConfig(f"{name}: spreads must be >= 0")
        ports = list(self.benign_ports) + [self.ddos_port]
        if not self.benign_ports or any(not 0 <= p <= 65535 for p in ports):
            raise InvalidConfig("ports must lie in [0, 65535] and benign_ports must be non-empty")

    @classmethod
    def from_text(cls, text: str, base: "SynthConfig | None" = None) -> "SynthConfig":
        """Parse ``key = value`` lines; feature keys look like ``total_len_fwd.ddos_spread``."""
        cfg = base or cls()
        top: dict = {}
        specs = {name: dict(vars(spec)) for name, spec in cfg.specs.items()}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidConfig(f"config line {lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                if "." in key:
                    feat, attr = key.split(".", 1)
                    if feat not in specs or attr not in _SPEC_KEYS:
                        raise InvalidConfig(f"config line {lineno}: unknown key {key!r}")
                    specs[feat][attr] = float(value)
                elif key in ("n_benign", "n_ddos", "seed", "ddos_port"):
                    top[key] = int(value)
                elif key == "overlap":
                    top[key] = float(value)
                elif key == "benign_ports":
                    top[key] = tuple(int(p) for p in value.split(",") if p.strip())
                elif key == "shuffle":
                    top[key] = value.lower() in ("1", "true", "yes")
                else:
                    raise InvalidConfig(f"config line {lineno}: unknown key {key!r}")
            except ValueError:
                raise InvalidConfig(f"config line {lineno}: bad value {value!r} for {key}") from None
        top["specs"] = {name: FeatureSpec(**vals) for name, vals in specs.items()}
        return replace(cfg, **top)


def _draw(rng, n, loc, spread, lower):
    values = rng.normal(loc, spread, size=n) if spread > 0 else np.full(n, float(loc))
    return np.rint(np.maximum(values, lower)).astype(np.int64)


def generate(cfg: SynthConfig | None = None) -> Dataset:
    cfg = cfg or SynthConfig()
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n_b, n_d = cfg.n_benign, cfg.n_ddos
    columns = {}
    ports = np.asarray(cfg.benign_ports, dtype=np.int64)
    columns["destination_port"] = np.concatenate(
        [rng.choice(ports, size=n_b), np.full(n_d, cfg.ddos_port, dtype=np.int64)])
    for name in NUMERIC_FIELDS[1:]:
        spec = cfg.specs[name]
        attack_loc = spec.ddos_loc + cfg.overlap * (spec.benign_loc - spec.ddos_loc)
        columns[name] = np.concatenate([
            _draw(rng, n_b, spec.benign_loc, spec.benign_spread, _LOWER[name]),
            _draw(rng, n_d, attack_loc, spec.ddos_spread, _LOWER[name]),
        ])
    labels = [Label.BENIGN] * n_b + [Label.DDOS] * n_d
    order = rng.permutation(n_b + n_d) if cfg.shuffle else np.arange(n_b + n_d)
    table = np.column_stack([columns[name] for name in NUMERIC_FIELDS]).tolist()
    records = tuple(FlowRecord(*table[i], labels[i]) for i in order.tolist())
    return Dataset(records, f"synth(seed={cfg.seed})")


# ---------------------------------------------------------------------------
# separable fixture

def separable_witness(dim: int = 2) -> tuple[np.ndarray, float]:
    """The hyperplane (w, b) that perfectly splits :func:`generate_separable` output."""
    return np.full(dim, 1.0 / math.sqrt(dim)), 0.0


def generate_separable(n_per_class: int, margin: float, seed: int,
                       spread: float = 1.0, dim: int = 2) -> FeatureMatrix:
    """Two Gaussian blobs split by the witness hyperplane with a gap of ``margin``.

    Class means sit at -/+ (margin/2 + 3*spread) along the witness normal,
    and each sample's offset along that normal is clipped to 3*spread, so
    every BENIGN row scores <= -margin/2 and every DDoS row >= +margin/2.
    """
    if not margin > 0:
        raise InvalidConfig(f"margin must be > 0, got {margin}")
    if n_per_class < 1 or spread <= 0 or dim < 1:
        raise InvalidConfig("need n_per_class >= 1, spread > 0 and dim >= 1")
    rng = np.random.default_rng(seed)
    u, _ = separable_witness(dim)
    offset = margin / 2.0 + 3.0 * spread
    blocks = []
    for sign in (-1.0, 1.0):
        z = rng.normal(0.0, spread, size=(n_per_class, dim))
        along = z @ u
        z += np.outer(np.clip(along, -3.0 * spread, 3.0 * spread) - along, u)
        blocks.append(z + sign * offset * u)
    X = np.vstack(blocks)
    y = np.repeat([0, 1], n_per_class)
    order = rng.permutation(2 * n_per_class)
    return FeatureMatrix(X[order], y[order], tuple(f"f{j}" for j in range(dim)))


# two flow columns carry the blob coordinates as integers
SEPARABLE_FLOW_FEATURES = ("total_len_fwd", "total_len_bwd")
_FLOW_SCALE = 1000.0
_FLOW_SHIFT = 100_000.0


def separable_flow_dataset(n_per_class: int, margin: float, seed: int) -> Dataset:
    """:func:`generate_separable` embedded in flow records.

    Coordinates are mapped to ``round(1000*x + 100000)`` in the two
    columns named by ``SEPARABLE_FLOW_FEATURES``; the rounding error is far
    below the margin so the witness still separates the rows.
    """
    fx = generate_separable(n_per_class, margin, seed, dim=2)
    coords = np.rint(fx.X * _FLOW_SCALE + _FLOW_SHIFT).astype(np.int64)
    if (coords < 0).any():
        raise InvalidConfig("margin too large to embed in non-negative byte counts")
    records = []
    for (a, b), code in zip(coords.tolist(), fx.y.tolist()):
        records.append(FlowRecord(80, 1000, 4, 4, a, b, 8192, 229, Label(code)))
    return Dataset(tuple(records), f"separable(seed={seed})")


def flow_witness_scores(ds: Dataset) -> np.ndarray:
    """Witness decision values for rows made by :func:`separable_flow_dataset`."""
    w, b = separable_witness(2)
    X = np.column_stack([ds.column(n) for n in SEPARABLE_FLOW_FEATURES])
    return ((X - _FLOW_SHIFT) / _FLOW_SCALE) @ w + b
