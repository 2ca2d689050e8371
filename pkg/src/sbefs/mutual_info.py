"""Histogram entropy and mutual information between features and the class.

All logarithms are base 2.
"""
from __future__ import annotations

import numpy as np

from .data import DataError


def discretize(values, n_bins):
    """Equal-width bin indexes over [min, max]; the max lands in the last bin.

    A constant vector maps entirely to bin 0.
    """
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    v = np.asarray(values, dtype=np.float64)
    lo, hi = v.min(), v.max()
    if not hi > lo:
        return np.zeros(v.shape, dtype=np.int64)
    idx = np.floor((v - lo) / (hi - lo) * n_bins).astype(np.int64)
    return np.clip(idx, 0, n_bins - 1)


def entropy(counts):
    """Entropy in bits of the empirical distribution given by ``counts``."""
    c = np.asarray(counts, dtype=np.float64).ravel()
    total = c.sum()
    if not total >= 1:
        raise ValueError("counts must sum to at least 1")
    p = c[c > 0] / total
    return float(max(0.0, -np.sum(p * np.log2(p))))


def joint_counts(x_codes, y_codes):
    """Contingency table of two non-negative integer code vectors."""
    x = np.asarray(x_codes, dtype=np.int64)
    y = np.asarray(y_codes, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    nx, ny = int(x.max()) + 1, int(y.max()) + 1
    return np.bincount(x * ny + y, minlength=nx * ny).reshape(nx, ny)


def conditional_entropy(table):
    """H(X|Y) in bits for a joint table with X on rows and Y on columns."""
    table = np.asarray(table, dtype=np.float64)
    n = table.sum()
    col = table.sum(axis=0)
    h = 0.0
    for j in np.flatnonzero(col):
        h += col[j] / n * entropy(table[:, j])
    return float(h)


def discrete_mutual_information(x_codes, y_codes):
    """IG(X;Y) = H(X) - H(X|Y) for already-discretized codes, clamped at 0."""
    table = joint_counts(x_codes, y_codes)
    ig = entropy(table.sum(axis=1)) - conditional_entropy(table)
    return float(ig) if ig > 0 else 0.0


def mutual_information(feature, labels, n_bins=10):
    feature = np.asarray(feature)
    labels = np.asarray(labels)
    if feature.shape[0] != labels.shape[0]:
        raise ValueError(f"length mismatch: {feature.shape[0]} values vs {labels.shape[0]} labels")
    if feature.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    return discrete_mutual_information(discretize(feature, n_bins), labels)


def information_gains(dataset, n_bins=10, ids=None):
    """Map feature ID -> IG in bits against the dataset labels."""
    ids = dataset.feature_ids if ids is None else ids
    return {
        int(f): mutual_information(dataset.samples[:, dataset.column_of(f)], dataset.labels, n_bins)
        for f in ids
    }


def counter_scores(dataset, remaining_ids, n_bins=10, gains=None):
    """Max-normalized information gain over ``remaining_ids``.

    ``gains`` may hold precomputed per-feature IG; the data never changes
    during a selection run, so only the normalization depends on the step.
    All scores are 0 when no remaining feature carries information.
    """
    remaining_ids = [int(f) for f in remaining_ids]
    if not remaining_ids:
        raise DataError("remaining feature set is empty")
    if gains is None:
        gains = information_gains(dataset, n_bins, remaining_ids)
    ig = {f: gains[f] for f in remaining_ids}
    top = max(ig.values())
    if top <= 0:
        return {f: 0.0 for f in remaining_ids}
    return {f: v / top for f, v in ig.items()}


def rank_features(dataset, n_bins=10):
    """(ID, IG) pairs sorted by IG descending, ties by ID ascending."""
    gains = information_gains(dataset, n_bins)
    return sorted(gains.items(), key=lambda kv: (-kv[1], kv[0]))
