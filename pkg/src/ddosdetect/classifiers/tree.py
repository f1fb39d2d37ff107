"""CART-style binary decision tree with Gini impurity.

Nodes live in a flat list; an internal node points at its children by
index. Rows with ``x[feature] <= threshold`` go left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch
from ..flow_data import Label
from ..preprocess import FeatureMatrix, Scaler
from .base import Hyperparams, TrainedModel, training_rows

LEAF = -1
_TIE_EPS = 1e-12


def gini(counts) -> float:
    """1 - sum(p_c^2) over the class counts of a node."""
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p * p).sum())


@dataclass(frozen=True)
class TreeNode:
    counts: tuple[int, int]            # (benign, ddos) training rows reaching the node
    feature: int = LEAF
    threshold: float = float("nan")
    left: int = LEAF
    right: int = LEAF

    @property
    def is_leaf(self) -> bool:
        return self.feature == LEAF

    @property
    def label(self) -> Label:
        # equal counts resolve to BENIGN
        return Label.DDOS if self.counts[1] > self.counts[0] else Label.BENIGN


def best_split(X, y):
    """Lowest weighted-Gini (feature, threshold) split of the rows, or None.

    Candidates are midpoints between consecutive distinct sorted values.
    Ties go to the lowest feature index, then the lowest threshold. Returns
    ``(feature, threshold, weighted_gini)``.
    """
    n, k = X.shape
    best = None
    for j in range(k):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ys = y[order]
        cut = np.flatnonzero(xs[1:] > xs[:-1]) + 1     # left side = rows [0, cut)
        if cut.size == 0:
            continue
        ddos_cum = np.cumsum(ys, dtype=np.int64)
        total_ddos = int(ddos_cum[-1])
        n_left = cut.astype(np.float64)
        n_right = n - n_left
        d_left = ddos_cum[cut - 1].astype(np.float64)
        d_right = total_ddos - d_left
        g_left = 1.0 - (d_left / n_left) ** 2 - ((n_left - d_left) / n_left) ** 2
        g_right = 1.0 - (d_right / n_right) ** 2 - ((n_right - d_right) / n_right) ** 2
        weighted = (n_left * g_left + n_right * g_right) / n
        lowest = weighted.min()
        pos = int(np.flatnonzero(weighted <= lowest + _TIE_EPS)[0])
        if best is None or weighted[pos] < best[2] - _TIE_EPS:
            lo, hi = xs[cut[pos] - 1], xs[cut[pos]]
            thr = lo + (hi - lo) / 2.0
            if not lo <= thr < hi:      # adjacent floats: midpoint rounds up to hi
                thr = lo
            best = (j, float(thr), float(weighted[pos]))
    return best


def grow(X, y, max_depth=None, min_samples_split=2) -> list[TreeNode]:
    """Build the node list. Node 0 is the root.

    A node becomes a leaf when it is pure, too small to split, at maximum
    depth, or when every row is identical on all features. Otherwise the
    best split is taken even if it leaves impurity unchanged; refusing such
    splits would make XOR-like patterns unlearnable at any depth.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int8)
    nodes: list[TreeNode | None] = [None]
    stack = [(0, np.arange(X.shape[0]), 0)]
    while stack:
        nid, idx, depth = stack.pop()
        n_ddos = int(y[idx].sum())
        counts = (len(idx) - n_ddos, n_ddos)
        split = None
        if (min(counts) > 0 and len(idx) >= min_samples_split
                and (max_depth is None or depth < max_depth)):
            split = best_split(X[idx], y[idx])
        if split is None:
            nodes[nid] = TreeNode(counts)
            continue
        feat, thr, _ = split
        go_left = X[idx, feat] <= thr
        left_id, right_id = len(nodes), len(nodes) + 1
        nodes.extend([None, None])
        nodes[nid] = TreeNode(counts, feat, thr, left_id, right_id)
        stack.append((right_id, idx[~go_left], depth + 1))
        stack.append((left_id, idx[go_left], depth + 1))
    return nodes


@dataclass(eq=False, kw_only=True)
class TreeModel(TrainedModel):
    kind = "tree"

    nodes: list[TreeNode] = field(default_factory=list)

    def __post_init__(self):
        self.nodes = list(self.nodes)
        _check_structure(self.nodes, len(self.feature_names))
        super().__post_init__()
        self._feature = np.array([nd.feature for nd in self.nodes], dtype=np.int64)
        self._threshold = np.array([nd.threshold for nd in self.nodes], dtype=np.float64)
        self._left = np.array([nd.left for nd in self.nodes], dtype=np.int64)
        self._right = np.array([nd.right for nd in self.nodes], dtype=np.int64)
        self._label = np.array([int(nd.label) for nd in self.nodes], dtype=np.int8)

    def depth(self) -> int:
        deepest = 0
        stack = [(0, 0)]
        while stack:
            nid, d = stack.pop()
            nd = self.nodes[nid]
            if nd.is_leaf:
                deepest = max(deepest, d)
            else:
                stack.extend([(nd.left, d + 1), (nd.right, d + 1)])
        return deepest

    def leaf_ids(self, X) -> np.ndarray:
        X = self.prepare(X)
        where = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self._feature[where] != LEAF)
        while active.size:
            nid = where[active]
            go_left = X[active, self._feature[nid]] <= self._threshold[nid]
            where[active] = np.where(go_left, self._left[nid], self._right[nid])
            active = active[self._feature[where[active]] != LEAF]
        return where

    def predict_codes(self, X) -> np.ndarray:
        return self._label[self.leaf_ids(X)]


def _check_structure(nodes, k):
    if not nodes:
        raise ValueError("tree has no nodes")
    seen = set()
    stack = [0]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise ValueError(f"tree node {nid} is reachable twice")
        seen.add(nid)
        nd = nodes[nid]
        if sum(nd.counts) <= 0:
            raise ValueError(f"tree node {nid} has no training samples")
        if nd.is_leaf:
            continue
        if not 0 <= nd.feature < k:
            raise DimensionMismatch(f"tree node {nid} splits on feature {nd.feature}, model has {k}")
        for child in (nd.left, nd.right):
            if not 0 <= child < len(nodes):
                raise ValueError(f"tree node {nid} points at missing child {child}")
            stack.append(child)
    if len(seen) != len(nodes):
        raise ValueError("tree contains unreachable nodes")


def train_tree(train: FeatureMatrix, h: Hyperparams | None = None, *,
               scaler: Scaler | None = None) -> TreeModel:
    h = h or Hyperparams()
    nodes = grow(training_rows(train, scaler), train.y, h.tree.max_depth, h.tree.min_samples_split)
    return TreeModel(
        feature_names=train.feature_names,
        scaler=scaler,
        hyperparams=h.for_kind("tree"),
        nodes=nodes,
    )
