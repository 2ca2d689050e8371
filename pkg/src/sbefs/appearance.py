"""Mean-template appearance model over a selected set of feature indexes.

A region is scored by how much closer its selected sub-vector lies to the
positive template than to the negative one (difference of Euclidean
distances). Vectors are used as-is, without normalization.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import DataError


@dataclass(frozen=True)
class AppearanceModel:
    positive_filter: np.ndarray
    negative_filter: np.ndarray
    selected_ids: tuple

    def __post_init__(self):
        pos = np.asarray(self.positive_filter, dtype=np.float64)
        neg = np.asarray(self.negative_filter, dtype=np.float64)
        ids = tuple(int(i) for i in self.selected_ids)
        if pos.shape != (len(ids),) or neg.shape != (len(ids),):
            raise DataError("filters must have one value per selected id")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(neg))):
            raise DataError("filter values must be finite")
        object.__setattr__(self, "positive_filter", pos)
        object.__setattr__(self, "negative_filter", neg)
        object.__setattr__(self, "selected_ids", ids)

    def swapped(self):
        return AppearanceModel(self.negative_filter, self.positive_filter, self.selected_ids)

    def to_dict(self):
        return {
            "selected_ids": list(self.selected_ids),
            "positive_filter": self.positive_filter.tolist(),
            "negative_filter": self.negative_filter.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["positive_filter"], d["negative_filter"], d["selected_ids"])


def _columns(matrix, selected_ids):
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix[None, :]
    idx = np.asarray(selected_ids, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= matrix.shape[1]):
        bad = idx[(idx < 0) | (idx >= matrix.shape[1])][0]
        raise DataError(f"feature index {bad} outside vector of width {matrix.shape[1]}")
    return matrix[:, idx]


def train_filter(examples, selected_ids):
    """Elementwise mean of the example rows restricted to ``selected_ids``."""
    examples = np.asarray(examples, dtype=np.float64)
    if examples.ndim != 2 or examples.shape[0] == 0:
        raise DataError("need at least one example row")
    return _columns(examples, selected_ids).mean(axis=0)


def build_model(positives, negatives, selected_ids):
    for name, block in (("positive", positives), ("negative", negatives)):
        block = np.asarray(block)
        if block.ndim != 2 or block.shape[0] == 0:
            raise DataError(f"{name} example set is empty")
    return AppearanceModel(
        train_filter(positives, selected_ids),
        train_filter(negatives, selected_ids),
        selected_ids,
    )


def region_scores(model, vectors):
    """Scores for each row of ``vectors`` (full-width feature vectors)."""
    sub = _columns(vectors, model.selected_ids)
    d_neg = np.sqrt(np.sum((sub - model.negative_filter) ** 2, axis=1))
    d_pos = np.sqrt(np.sum((sub - model.positive_filter) ** 2, axis=1))
    return d_neg - d_pos


def region_score(model, feature_vector):
    """d(negative, O) - d(positive, O) over the selected indexes; larger is more positive-like."""
    return float(region_scores(model, np.asarray(feature_vector, dtype=np.float64)[None, :])[0])


def save_model(model, path):
    # json writes floats with repr, which round-trips float64 exactly
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


def load_model(path):
    try:
        return AppearanceModel.from_dict(json.loads(Path(path).read_text()))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: not an appearance model file ({exc})") from None
