"""Linear SVM (Pegasos-style subgradient descent) and UAR scoring.

The bias is learned as the weight of an implicit constant input of 1 and is
regularized together with the feature weights. Steps follow 1/(lam * t) with
lam = 1/(C * n), iterates are projected onto the ball of radius 1/sqrt(lam),
and the returned model is the mean of the iterates of the final epoch (the
last raw iterate is too noisy when lam is this small).
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .data import DataError, Standardizer, _fit


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    epochs: int = 10
    t0: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")
        if int(self.epochs) < 1:
            raise ValueError("epochs must be >= 1")
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    active_ids: tuple
    standardizer: Standardizer

    def decision(self, z):
        """Decision values for already-standardized rows ``z``."""
        return np.asarray(z) @ self.weights + self.bias


@dataclass(frozen=True)
class ConfusionCounts:
    """Per-class tallies of correct and wrong predictions."""

    correct: np.ndarray
    wrong: np.ndarray

    @classmethod
    def zeros(cls, n_classes):
        return cls(np.zeros(n_classes, dtype=np.int64), np.zeros(n_classes, dtype=np.int64))

    @classmethod
    def from_predictions(cls, y_true, y_pred, n_classes):
        y_true = np.asarray(y_true)
        hit = y_true == np.asarray(y_pred)
        correct = np.bincount(y_true[hit], minlength=n_classes).astype(np.int64)
        wrong = np.bincount(y_true[~hit], minlength=n_classes).astype(np.int64)
        return cls(correct, wrong)

    def __add__(self, other):
        return ConfusionCounts(self.correct + other.correct, self.wrong + other.wrong)

    @property
    def total(self):
        return int(self.correct.sum() + self.wrong.sum())

    def to_dict(self):
        return {"correct": self.correct.tolist(), "wrong": self.wrong.tolist()}


def uar(counts):
    """Unweighted average recall: mean over classes of correct / evaluated."""
    correct = np.asarray(counts.correct, dtype=np.int64)
    seen = correct + np.asarray(counts.wrong, dtype=np.int64)
    if np.any(seen <= 0):
        empty = int(np.flatnonzero(seen <= 0)[0])
        raise ValueError(f"class {empty} has no evaluated samples; recall undefined")
    return float(np.mean(correct / seen))


@numba.njit(cache=True, nogil=True)
def _pegasos(z, y, orders, lam, t0):
    n, d = z.shape
    w = np.zeros(d)
    b = 0.0
    radius2 = 1.0 / lam
    w_avg = np.zeros(d)
    b_avg = 0.0
    n_avg = 0
    last = orders.shape[0] - 1
    t = 0
    for e in range(orders.shape[0]):
        for j in range(n):
            i = orders[e, j]
            t += 1
            eta = 1.0 / (lam * (t + t0 - 1.0))
            margin = b
            for c in range(d):
                margin += w[c] * z[i, c]
            margin *= y[i]
            shrink = 1.0 - eta * lam
            for c in range(d):
                w[c] *= shrink
            b *= shrink
            if margin < 1.0:
                step = eta * y[i]
                for c in range(d):
                    w[c] += step * z[i, c]
                b += step
            norm2 = b * b
            for c in range(d):
                norm2 += w[c] * w[c]
            if norm2 > radius2:
                s = np.sqrt(radius2 / norm2)
                for c in range(d):
                    w[c] *= s
                b *= s
            if e == last:
                n_avg += 1
                for c in range(d):
                    w_avg[c] += (w[c] - w_avg[c]) / n_avg
                b_avg += (b - b_avg) / n_avg
    return w_avg, b_avg


def objective(weights, bias, z, y_signed, lam):
    """L2-regularized mean hinge loss, lam/2 * (|w|^2 + b^2) + mean hinge."""
    margins = y_signed * (np.asarray(z) @ weights + bias)
    reg = 0.5 * lam * (float(weights @ weights) + bias * bias)
    return reg + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def _signed(labels):
    return np.where(np.asarray(labels) == 1, 1.0, -1.0)


def _check_binary(labels, n_classes):
    if n_classes > 2:
        raise DataError("binary classifier only")
    if np.unique(labels).size < 2:
        raise DataError("training rows contain a single class")


def _fit_arrays(z, y_signed, config):
    n = z.shape[0]
    lam = 1.0 / (config.C * n)
    rng = np.random.default_rng(config.seed)
    orders = np.stack([rng.permutation(n) for _ in range(int(config.epochs))])
    return _pegasos(np.ascontiguousarray(z), y_signed, orders, lam, float(config.t0))


def train(view, row_indices, config):
    """Train a linear SVM on ``row_indices`` of ``view``.

    A fresh standardizer is fitted on the training rows and stored on the model.
    """
    rows = np.asarray(row_indices, dtype=np.int64)
    labels = view.labels[rows]
    _check_binary(labels, view.source.n_classes)
    block = view.matrix()[rows]
    std = _fit(block)
    w, b = _fit_arrays(std.transform(block), _signed(labels), config)
    return LinearModel(w, float(b), tuple(view.active_ids), std)


def predict_rows(model, view, rows):
    if tuple(view.active_ids) != tuple(model.active_ids):
        raise DataError("view feature ids do not match the model")
    z = model.standardizer.transform(view.matrix()[np.asarray(rows, dtype=np.int64)])
    return (model.decision(z) > 0).astype(np.int64)


def predict(model, view, row):
    """Class 1 when the decision value is strictly positive, else class 0."""
    return int(predict_rows(model, view, [row])[0])


def _fold_counts(x, labels, train_rows, val_rows, n_classes, config):
    block = x[train_rows]
    y = labels[train_rows]
    _check_binary(y, n_classes)
    std = _fit(block)
    w, b = _fit_arrays(std.transform(block), _signed(y), config)
    pred = (std.transform(x[val_rows]) @ w + b > 0).astype(np.int64)
    return ConfusionCounts.from_predictions(labels[val_rows], pred, n_classes)


def stratified_folds(labels, k, seed):
    """Assign every row to one of ``k`` folds, preserving class proportions.

    Returns an int array of fold indexes, one per row.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    folds = np.empty(labels.shape[0], dtype=np.int64)
    offset = 0
    for cls in range(int(labels.max()) + 1):
        rows = np.flatnonzero(labels == cls)
        if rows.size < k:
            raise DataError(f"class {cls} has {rows.size} samples, fewer than k={k}")
        rows = rng.permutation(rows)
        # Rotate the dealing start so small classes do not all pile into fold 0.
        folds[rows] = (np.arange(rows.size) + offset) % k
        offset += rows.size
    return folds


def stratified_split(labels, holdout_fraction, seed):
    """Split rows into (train, validation) index arrays with class proportions kept.

    Every class contributes at least one row to each side.
    """
    if not 0 < holdout_fraction < 1:
        raise ValueError("holdout_fraction must be in (0, 1)")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train_rows, val_rows = [], []
    for cls in range(int(labels.max()) + 1):
        rows = rng.permutation(np.flatnonzero(labels == cls))
        if rows.size < 2:
            raise DataError(f"class {cls} needs at least 2 samples for a holdout split")
        n_val = min(rows.size - 1, max(1, int(round(holdout_fraction * rows.size))))
        val_rows.append(rows[:n_val])
        train_rows.append(rows[n_val:])
    return np.sort(np.concatenate(train_rows)), np.sort(np.concatenate(val_rows))


def kfold_confusion(view, k, config, seed, folds=None):
    """Merged confusion counts of stratified k-fold evaluation of ``view``.

    Each row is predicted exactly once, by a model trained on the other folds.
    ``folds`` may carry a precomputed assignment from ``stratified_folds``.
    """
    labels = view.labels
    n_classes = view.source.n_classes
    if folds is None:
        folds = stratified_folds(labels, k, seed)
    x = view.matrix()
    total = ConfusionCounts.zeros(n_classes)
    for fold in range(k):
        val = folds == fold
        total = total + _fold_counts(
            x, labels, np.flatnonzero(~val), np.flatnonzero(val), n_classes, config
        )
    return total


def holdout_confusion(view, train_rows, val_rows, config):
    """Counts for one fixed split: fit on ``train_rows``, predict ``val_rows``."""
    return _fold_counts(
        view.matrix(),
        view.labels,
        np.asarray(train_rows, dtype=np.int64),
        np.asarray(val_rows, dtype=np.int64),
        view.source.n_classes,
        config,
    )
