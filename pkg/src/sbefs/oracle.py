"""Exhaustive classical sequential backward elimination on one fixed split.

Used to cross-check the selector on small problems: at every step each
remaining feature is dropped in turn, and the drop giving the best
validation UAR is made permanent (ties go to the smaller ID).
"""
from __future__ import annotations

from dataclasses import replace

from . import _rng
from .classifier import holdout_confusion, uar
from .data import DataError, project
from .selector import selection_split


def sbe_oracle(dataset, config):
    """Return the removal order from the full feature set down to ``config.target_count``.

    Uses the same validation split and training seed as ``run_selection``
    with ``validation="holdout"`` and the same ``config``.
    """
    if config.target_count >= dataset.n_features:
        raise DataError("target_count must be below the feature count")
    train_cfg = replace(config.train, seed=_rng.derive_seed(config.seed, "train"))
    train_rows, val_rows = selection_split(dataset.labels, config)
    remaining = [int(f) for f in dataset.feature_ids]
    removed = []
    while len(remaining) > config.target_count:
        best = None
        for f in sorted(remaining):
            ids = [g for g in remaining if g != f]
            score = uar(holdout_confusion(project(dataset, ids), train_rows, val_rows, train_cfg))
            if best is None or score > best[0]:
                best = (score, f)
        removed.append(best[1])
        remaining.remove(best[1])
    return removed
