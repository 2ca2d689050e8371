"""Dataset container, column projection and per-feature standardization."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised for malformed datasets or invalid feature references."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Sample-major feature matrix with dense integer labels.

    ``feature_ids`` are the permanent identifiers of the columns; they never
    change however many times the data is projected.
    """

    samples: np.ndarray
    labels: np.ndarray
    feature_ids: np.ndarray = None
    label_names: tuple = ()

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        labels = np.asarray(self.labels)
        if samples.ndim != 2:
            raise DataError("samples must be a 2-D matrix")
        if labels.ndim != 1 or labels.shape[0] != samples.shape[0]:
            raise DataError(
                f"labels length {labels.shape[0] if labels.ndim == 1 else labels.shape} "
                f"does not match {samples.shape[0]} sample rows"
            )
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise DataError("labels must be integer class indexes")
        labels = labels.astype(np.int64)
        if labels.size and labels.min() < 0:
            raise DataError("labels must be >= 0")
        if not np.all(np.isfinite(samples)):
            raise DataError("all feature values must be finite")
        n_classes = int(labels.max()) + 1 if labels.size else 0
        counts = np.bincount(labels, minlength=n_classes)
        if n_classes < 2 or np.any(counts == 0):
            raise DataError("need at least 2 classes, each with at least one sample")
        ids = self.feature_ids
        if ids is None:
            ids = np.arange(samples.shape[1])
        ids = np.asarray(ids, dtype=np.int64)
        if ids.shape != (samples.shape[1],):
            raise DataError("feature_ids must have one entry per column")
        if np.unique(ids).size != ids.size:
            raise DataError("feature_ids must be unique")
        samples.setflags(write=False)
        labels.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_ids", ids)
        object.__setattr__(self, "label_names", tuple(self.label_names))
        object.__setattr__(self, "_position", {int(f): i for i, f in enumerate(ids)})

    @property
    def n_samples(self):
        return self.samples.shape[0]

    @property
    def n_features(self):
        return self.samples.shape[1]

    @property
    def n_classes(self):
        return int(self.labels.max()) + 1

    def column_of(self, feature_id):
        try:
            return self._position[int(feature_id)]
        except KeyError:
            raise DataError(f"unknown feature id {feature_id}") from None

    def take_rows(self, rows):
        """New dataset restricted to ``rows``; labels are kept as-is."""
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.samples[rows], self.labels[rows], self.feature_ids, self.label_names)


@dataclass(frozen=True, eq=False)
class FeatureSubsetView:
    """Columns of ``source`` restricted to ``active_ids``, in that order."""

    source: Dataset
    active_ids: tuple
    _columns: np.ndarray = field(repr=False, default=None)
    _matrix: np.ndarray = field(repr=False, default=None)

    @property
    def labels(self):
        return self.source.labels

    @property
    def n_features(self):
        return len(self.active_ids)

    def matrix(self):
        if self._matrix is None:
            m = np.ascontiguousarray(self.source.samples[:, self._columns])
            m.setflags(write=False)
            object.__setattr__(self, "_matrix", m)
        return self._matrix

    def permanent_id(self, position):
        """Permanent feature ID of column ``position`` in this view."""
        return self.active_ids[position]


def project(dataset, ids):
    """Materialize the columns ``ids`` of ``dataset`` as a view.

    Raises DataError on an empty list, an unknown ID or a repeated ID.
    """
    ids = [int(i) for i in ids]
    if not ids:
        raise DataError("feature id list is empty")
    if len(set(ids)) != len(ids):
        seen = set()
        dup = next(i for i in ids if i in seen or seen.add(i))
        raise DataError(f"duplicate feature id {dup}")
    columns = np.array([dataset.column_of(i) for i in ids], dtype=np.int64)
    return FeatureSubsetView(dataset, tuple(ids), columns)


@dataclass(frozen=True)
class Standardizer:
    means: np.ndarray
    stdevs: np.ndarray

    def transform(self, x):
        x = np.asarray(x, dtype=np.float64)
        scale = np.where(self.stdevs > 0, self.stdevs, 1.0)
        z = (x - self.means) / scale
        return np.where(self.stdevs > 0, z, 0.0)


def fit_standardizer(view, row_indices):
    """Fit per-column mean and population standard deviation on ``row_indices``."""
    rows = np.asarray(row_indices, dtype=np.int64)
    if rows.size == 0:
        raise DataError("cannot fit a standardizer on zero rows")
    return _fit(view.matrix()[rows])


def _fit(block):
    means = block.mean(axis=0)
    stdevs = block.std(axis=0)
    # Float noise on constant columns must not produce a tiny nonzero scale.
    stdevs = np.where(stdevs <= 1e-12 * np.maximum(1.0, np.abs(means)), 0.0, stdevs)
    return Standardizer(means, stdevs)
