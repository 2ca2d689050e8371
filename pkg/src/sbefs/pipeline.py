"""Selection with a held-out comparison, packaged as a JSON-ready run report."""
from __future__ import annotations

import time
from dataclasses import replace

from . import __version__, _rng
from .classifier import holdout_confusion, stratified_split, uar
from .data import project
from .selector import run_selection


def holdout_uars(dataset, train_rows, test_rows, selected_ids, train_config):
    """Held-out UAR of an SVM on all features and on ``selected_ids``."""
    full = uar(holdout_confusion(project(dataset, dataset.feature_ids), train_rows, test_rows, train_config))
    sel = uar(holdout_confusion(project(dataset, selected_ids), train_rows, test_rows, train_config))
    return full, sel


def select_with_report(dataset, config, report_holdout=0.25, source=None, on_step=None):
    """Run selection on a stratified training part and score both subsets on the rest.

    With ``report_holdout=0`` the whole dataset is used for selection and the
    held-out comparison is omitted. Returns ``(SelectionResult, report_dict)``.
    """
    started = time.perf_counter()
    if report_holdout:
        train_rows, test_rows = stratified_split(
            dataset.labels, report_holdout, _rng.derive_seed(config.seed, "report-holdout")
        )
        selection_data = dataset.take_rows(train_rows)
    else:
        selection_data = dataset

    step_times = []
    last = [time.perf_counter()]

    def timed(record):
        now = time.perf_counter()
        step_times.append(now - last[0])
        last[0] = now
        if on_step is not None:
            on_step(record)

    result = run_selection(selection_data, config, on_step=timed)
    steps = []
    for record, seconds in zip(result.trace, step_times):
        d = record.to_dict()
        d["wall_seconds"] = seconds
        steps.append(d)

    report = {
        "tool": "sbefs",
        "version": __version__,
        "data": {
            "source": None if source is None else str(source),
            "n_samples": dataset.n_samples,
            "n_features": dataset.n_features,
            "label_names": list(dataset.label_names),
        },
        "config": config.to_dict(),
        "report_holdout": report_holdout,
        "selected_ids": [int(f) for f in result.selected_ids],
        "removed_order": [int(f) for f in result.removed_order],
        "steps": steps,
        "total_evaluations": result.evaluations,
    }
    if report_holdout:
        train_cfg = replace(config.train, seed=_rng.derive_seed(config.seed, "train"))
        full, sel = holdout_uars(dataset, train_rows, test_rows, result.selected_ids, train_cfg)
        report["holdout"] = {
            "n_train": int(len(train_rows)),
            "n_test": int(len(test_rows)),
            "full_uar": full,
            "selected_uar": sel,
        }
    report["wall_seconds"] = time.perf_counter() - started
    return result, report
