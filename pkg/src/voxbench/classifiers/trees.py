"""CART decision trees (Gini impurity) and their bootstrap-aggregated ensemble."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

from .base import LabeledDataset, TrainedClassifier


class _TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "fractions")

    def __init__(self, fractions):
        self.feature = None
        self.threshold = None
        self.left = None
        self.right = None
        self.fractions = fractions

    @property
    def is_leaf(self):
        return self.feature is None


def _class_fractions(labels: np.ndarray, class_count: int) -> np.ndarray:
    return np.bincount(labels, minlength=class_count) / labels.size


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - (p**2).sum())


def _best_split(x, y, class_count, min_leaf):
    """Largest Gini-impurity decrease over all axis-aligned threshold splits.

    Returns (decrease, feature, threshold) or None when no admissible split
    improves on the parent. Scan order makes ties deterministic.
    """
    n = y.size
    parent = _gini(np.bincount(y, minlength=class_count)) * n
    if parent == 0.0 or n < 2 * min_leaf:
        return None
    best = None
    onehot = np.zeros((n, class_count))
    onehot[np.arange(n), y] = 1.0
    left_sizes = np.arange(1, n, dtype=np.float64)
    right_sizes = n - left_sizes
    for feature in range(x.shape[1]):
        order = np.argsort(x[:, feature], kind="stable")
        values = x[order, feature]
        left_counts = np.cumsum(onehot[order], axis=0)[:-1]
        right_counts = left_counts[-1] + onehot[order[-1]] - left_counts
        gini_left = left_sizes - (left_counts**2).sum(axis=1) / left_sizes
        gini_right = right_sizes - (right_counts**2).sum(axis=1) / right_sizes
        decrease = parent - gini_left - gini_right
        admissible = (
            (values[:-1] != values[1:])
            & (left_sizes >= min_leaf)
            & (right_sizes >= min_leaf)
        )
        decrease[~admissible] = -np.inf
        i = int(decrease.argmax())
        # zero-gain splits are admitted (XOR-style nodes need them); growth
        # still halts at pure nodes and the size/budget limits
        if np.isfinite(decrease[i]) and (best is None or decrease[i] > best[0]):
            best = (float(decrease[i]), feature, (values[i] + values[i + 1]) / 2.0)
    return best


def grow_tree(x, y, class_count, max_splits, min_leaf):
    """Best-first CART growth under a total split budget."""
    root = _TreeNode(_class_fractions(y, class_count))
    order = itertools.count()  # FIFO tie-break keeps growth deterministic
    heap = []

    def push(node, idx):
        split = _best_split(x[idx], y[idx], class_count, min_leaf)
        if split is not None:
            heapq.heappush(heap, (-split[0], next(order), node, idx, split[1], split[2]))

    push(root, np.arange(y.size))
    splits = 0
    while heap and splits < max_splits:
        _, _, node, idx, feature, threshold = heapq.heappop(heap)
        node.feature = feature
        node.threshold = threshold
        left_idx = idx[x[idx, feature] <= threshold]
        right_idx = idx[x[idx, feature] > threshold]
        node.left = _TreeNode(_class_fractions(y[left_idx], class_count))
        node.right = _TreeNode(_class_fractions(y[right_idx], class_count))
        push(node.left, left_idx)
        push(node.right, right_idx)
        splits += 1
    return root


def _leaf_fractions(root: _TreeNode, point: np.ndarray) -> np.ndarray:
    node = root
    while not node.is_leaf:
        node = node.left if point[node.feature] <= node.threshold else node.right
    return node.fractions


@dataclass(frozen=True)
class DecisionTreeModel:
    root: _TreeNode
    class_count: int

    def scores(self, queries: np.ndarray) -> np.ndarray:
        return np.vstack([_leaf_fractions(self.root, q) for q in queries])


def tree_train(data: LabeledDataset, max_splits: int = 100, min_leaf: int = 1) -> TrainedClassifier:
    """Binary CART with axis-aligned splits; leaves predict their majority class."""
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    x, y = data.train_points, data.train_labels
    root = grow_tree(x, y, data.class_count, max_splits, min_leaf)
    return TrainedClassifier(
        kind="complex tree",
        payload=DecisionTreeModel(root=root, class_count=data.class_count),
        class_count=data.class_count,
        input_dim=x.shape[1],
    )


@dataclass(frozen=True)
class BaggedTreesModel:
    trees: list = field(repr=False)
    class_count: int = 0

    def scores(self, queries: np.ndarray) -> np.ndarray:
        votes = np.zeros((queries.shape[0], self.class_count))
        for root in self.trees:
            leaf = np.vstack([_leaf_fractions(root, q) for q in queries])
            votes[np.arange(queries.shape[0]), leaf.argmax(axis=1)] += 1.0
        return votes / len(self.trees)


def bagged_trees_train(
    data: LabeledDataset,
    n_trees: int = 30,
    seed: int = 0,
    max_splits: int = 100,
    min_leaf: int = 1,
    resample: bool = True,
) -> TrainedClassifier:
    """CART ensemble on seeded bootstrap resamples, majority vote at query time.

    resample=False trains every tree on the full split (degenerates to a
    single tree when n_trees=1); kept as a validation hook.
    """
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    x, y = data.train_points, data.train_labels
    rng = np.random.default_rng(seed)
    trees = []
    for _ in range(n_trees):
        idx = rng.integers(0, y.size, y.size) if resample else np.arange(y.size)
        trees.append(grow_tree(x[idx], y[idx], data.class_count, max_splits, min_leaf))
    return TrainedClassifier(
        kind="bagged trees",
        payload=BaggedTreesModel(trees=trees, class_count=data.class_count),
        class_count=data.class_count,
        input_dim=x.shape[1],
    )
