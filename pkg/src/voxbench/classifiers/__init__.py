"""The five classifier families and their shared containers."""

from __future__ import annotations

from .base import LabeledDataset, TrainedClassifier, predict
from .ffnn import FeedForwardNet, ffnn_train
from .knn import knn_train
from .svm import svm_train
from .trees import bagged_trees_train, tree_train

# canonical benchmark names, in report row order
CLASSIFIER_NAMES = ("complex tree", "weighted knn", "fine svm", "feed forward", "bagged trees")


def train_by_name(name: str, data: LabeledDataset, seed: int = 0, **params) -> TrainedClassifier:
    """Train one of the named presets; params override the preset defaults."""
    if name == "complex tree":
        return tree_train(data, **{"max_splits": 100, "min_leaf": 1, **params})
    if name == "weighted knn":
        return knn_train(data, **{"k": 10, **params})
    if name == "fine svm":
        return svm_train(data, **params)
    if name == "feed forward":
        return ffnn_train(data, seed=seed, **params)
    if name == "bagged trees":
        return bagged_trees_train(data, seed=seed, **{"n_trees": 30, **params})
    raise ValueError(f"unknown classifier {name!r}; expected one of {CLASSIFIER_NAMES}")


__all__ = [
    "CLASSIFIER_NAMES",
    "FeedForwardNet",
    "LabeledDataset",
    "TrainedClassifier",
    "bagged_trees_train",
    "ffnn_train",
    "knn_train",
    "predict",
    "svm_train",
    "train_by_name",
    "tree_train",
]
