"""Randomized-subset sequential backward elimination.

Each step repeatedly shuffles the remaining features into subsets of about
sqrt(N) features, scores every subset by the UAR of a k-fold evaluated linear
SVM, and credits each member with the subset's UAR minus the running UAR of
all counts seen in the step. Once the iteration UARs settle (their population
standard deviation falls below ``local_threshold`` after at least
``min_iterations_per_step`` iterations), a mutual-information counter score
is mixed in and the lowest-relevance features are removed together.
"""
from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import _rng
from .classifier import (
    ConfusionCounts,
    TrainConfig,
    holdout_confusion,
    kfold_confusion,
    stratified_folds,
    stratified_split,
    uar,
)
from .data import DataError, project
from .mutual_info import counter_scores, information_gains

SUBSET_SCHEMES = ("random", "complement")
VALIDATIONS = ("kfold", "holdout")
BASELINES = ("subset", "iteration")


@dataclass(frozen=True)
class SelectionConfig:
    """Parameters of a selection run.

    ``train.seed`` is not used directly: the training order seed, the fold
    assignment and the subset shuffles are all derived from ``seed``.

    ``subset_scheme="complement"`` evaluates the N leave-one-out subsets
    instead of random sqrt(N) chunks; together with ``baseline="iteration"``,
    ``validation="holdout"`` and one removal per step it reproduces classical
    sequential backward elimination.
    """

    target_count: int
    k_folds: int = 3
    local_threshold: float = 0.6
    min_iterations_per_step: int = 5
    max_iterations_per_step: int = 50
    removal_fraction: float = 0.05
    n_bins: int = 10
    counter_score_enabled: bool = True
    subset_size_override: int | None = None
    subset_scheme: str = "random"
    baseline: str = "subset"
    validation: str = "kfold"
    holdout_fraction: float = 0.3
    seed: int = 0
    jobs: int = 1
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.target_count < 1:
            raise ValueError("target_count must be >= 1")
        if self.k_folds < 2:
            raise ValueError("k_folds must be >= 2")
        if not self.local_threshold > 0:
            raise ValueError("local_threshold must be positive")
        if self.min_iterations_per_step < 2:
            raise ValueError("min_iterations_per_step must be >= 2")
        if self.max_iterations_per_step < self.min_iterations_per_step:
            raise ValueError("max_iterations_per_step must be >= min_iterations_per_step")
        if not 0 < self.removal_fraction <= 1:
            raise ValueError("removal_fraction must be in (0, 1]")
        if self.n_bins < 2:
            raise ValueError("n_bins must be >= 2")
        if self.subset_size_override is not None and self.subset_size_override < 1:
            raise ValueError("subset_size_override must be >= 1")
        if self.subset_scheme not in SUBSET_SCHEMES:
            raise ValueError(f"subset_scheme must be one of {SUBSET_SCHEMES}")
        if self.baseline not in BASELINES:
            raise ValueError(f"baseline must be one of {BASELINES}")
        if self.validation not in VALIDATIONS:
            raise ValueError(f"validation must be one of {VALIDATIONS}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if isinstance(self.train, dict):
            object.__setattr__(self, "train", TrainConfig(**self.train))

    def to_dict(self):
        return asdict(self)


@dataclass
class SelectionState:
    remaining_ids: list
    rng: np.random.Generator
    contributions: dict = field(default_factory=dict)
    step_scores: list = field(default_factory=list)
    step_counts: ConfusionCounts | None = None
    step: int = 0
    iteration: int = 0
    evaluations: int = 0

    @property
    def relevance(self):
        # fsum is order independent, so equal multisets of credits tie exactly.
        return {f: math.fsum(self.contributions[f]) for f in self.remaining_ids}

    def begin_step(self, n_classes):
        self.contributions = {f: [] for f in self.remaining_ids}
        self.step_scores = []
        self.step_counts = ConfusionCounts.zeros(n_classes)
        self.iteration = 0


@dataclass(frozen=True)
class StepRecord:
    step: int
    iterations: int
    local_criterion: float
    step_uar: float
    alpha: float
    removed: list
    remaining_after: int
    capped: bool = False

    def to_dict(self):
        d = asdict(self)
        d["removed"] = [{"id": int(f), "relevance": float(r)} for f, r in self.removed]
        return d


@dataclass(frozen=True)
class SelectionResult:
    selected_ids: list
    trace: list
    evaluations: int

    @property
    def removed_order(self):
        return [f for rec in self.trace for f, _ in rec.removed]


def subset_size(n_remaining):
    """round(sqrt(n)), at least 1."""
    if n_remaining < 1:
        raise ValueError("n_remaining must be >= 1")
    return max(1, int(math.floor(math.sqrt(n_remaining) + 0.5)))


def partition_subsets(state, size=None, scheme="random"):
    """Shuffle the remaining IDs with the state's generator and cut them into chunks.

    With ``scheme="complement"`` the chunks are the leave-one-out sets, each
    keeping the remaining IDs in their current order.
    """
    ids = list(state.remaining_ids)
    if not ids:
        raise DataError("no remaining features to partition")
    order = [ids[i] for i in state.rng.permutation(len(ids))]
    if scheme == "complement":
        if len(ids) < 2:
            raise DataError("complement subsets need at least 2 remaining features")
        return [[f for f in ids if f != left_out] for left_out in order]
    size = subset_size(len(ids)) if size is None else size
    return [order[i:i + size] for i in range(0, len(order), size)]


def make_evaluator(dataset, config):
    """Return ``evaluate(ids) -> ConfusionCounts`` with folds and seeds fixed for the run."""
    train_cfg = replace(config.train, seed=_rng.derive_seed(config.seed, "train"))
    if config.validation == "holdout":
        train_rows, val_rows = selection_split(dataset.labels, config)

        def evaluate(ids):
            return holdout_confusion(project(dataset, ids), train_rows, val_rows, train_cfg)

    else:
        folds = stratified_folds(dataset.labels, config.k_folds, _rng.derive_seed(config.seed, "folds"))

        def evaluate(ids):
            return kfold_confusion(project(dataset, ids), config.k_folds, train_cfg, None, folds=folds)

    return evaluate


def selection_split(labels, config):
    """The fixed (train, validation) rows used when ``validation="holdout"``."""
    return stratified_split(labels, config.holdout_fraction, _rng.derive_seed(config.seed, "holdout"))


def run_iteration(state, dataset, config, evaluate=None, pool=None):
    """Evaluate one partition of the remaining features and update relevance.

    Returns the iteration UAR, computed from the merged counts of all subsets.
    """
    if len(state.remaining_ids) <= config.target_count:
        raise DataError("remaining feature count already at target")
    if evaluate is None:
        evaluate = make_evaluator(dataset, config)
    if state.step_counts is None:
        state.begin_step(dataset.n_classes)
    subsets = partition_subsets(state, config.subset_size_override, config.subset_scheme)
    if pool is not None:
        results = list(pool.map(evaluate, subsets))
    else:
        results = [evaluate(s) for s in subsets]
    state.evaluations += len(subsets)

    iteration_counts = ConfusionCounts.zeros(dataset.n_classes)
    scores = [uar(c) for c in results]
    if config.baseline == "subset":
        for subset, counts, score in zip(subsets, results, scores):
            iteration_counts = iteration_counts + counts
            state.step_counts = state.step_counts + counts
            baseline = uar(state.step_counts)
            for f in subset:
                state.contributions[f].append(score - baseline)
    else:
        for counts in results:
            iteration_counts = iteration_counts + counts
        state.step_counts = state.step_counts + iteration_counts
        baseline = uar(state.step_counts)
        for subset, score in zip(subsets, scores):
            for f in subset:
                state.contributions[f].append(score - baseline)

    state.iteration += 1
    p = uar(iteration_counts)
    state.step_scores.append(p)
    return p


def local_criterion(step_scores):
    """Population standard deviation of the iteration UARs of a step."""
    if len(step_scores) < 2:
        raise ValueError("need at least 2 iteration scores")
    # statistics.pstdev works in exact rationals, so equal scores give exactly 0
    return float(statistics.pstdev(float(p) for p in step_scores))


def apply_counter_score(state, scores, full_count, enabled=True):
    """Add alpha * I_f to every remaining feature's relevance and return alpha.

    alpha is the largest current relevance (floored at 0) scaled by the
    fraction of the original features still remaining.
    """
    if not enabled:
        return 0.0
    missing = set(state.remaining_ids) - set(scores)
    if missing:
        raise DataError(f"no counter score for feature id {min(missing)}")
    relevance = state.relevance
    r_max = max(0.0, max(relevance.values()))
    alpha = r_max * len(state.remaining_ids) / full_count
    if alpha > 0:
        for f in state.remaining_ids:
            state.contributions[f].append(alpha * scores[f])
    return alpha


def removal_count(n_remaining, target, fraction):
    """ceil(fraction * n), at least 1, never going below ``target``."""
    if n_remaining <= target:
        raise ValueError("n_remaining must exceed target")
    # Round first so that e.g. 0.05 * 60 = 3.0000000000000004 does not ceil to 4.
    m = max(1, math.ceil(round(fraction * n_remaining, 9)))
    return min(m, n_remaining - target)


def select_lsf(state, m):
    """Remove the ``m`` lowest-relevance features; ties go to the smaller ID first.

    Returns the removed (id, relevance) pairs in removal order.
    """
    if m >= len(state.remaining_ids):
        raise ValueError(f"cannot remove {m} of {len(state.remaining_ids)} remaining features")
    relevance = state.relevance
    ranked = sorted(state.remaining_ids, key=lambda f: (relevance[f], f))
    removed = ranked[:m]
    gone = set(removed)
    state.remaining_ids = [f for f in state.remaining_ids if f not in gone]
    for f in removed:
        state.contributions.pop(f, None)
    return [(f, relevance[f]) for f in removed]


def _run_step(state, dataset, config, evaluate, gains, full_count, pool):
    state.begin_step(dataset.n_classes)
    capped = False
    while True:
        run_iteration(state, dataset, config, evaluate, pool)
        if state.iteration >= config.min_iterations_per_step:
            lc = local_criterion(state.step_scores)
            if lc < config.local_threshold:
                break
            if state.iteration >= config.max_iterations_per_step:
                capped = True
                break
    alpha = 0.0
    if config.counter_score_enabled:
        scores = counter_scores(dataset, state.remaining_ids, config.n_bins, gains)
        alpha = apply_counter_score(state, scores, full_count)
    m = removal_count(len(state.remaining_ids), config.target_count, config.removal_fraction)
    removed = select_lsf(state, m)
    state.step += 1
    return StepRecord(
        step=state.step,
        iterations=state.iteration,
        local_criterion=lc,
        step_uar=uar(state.step_counts),
        alpha=float(alpha),
        removed=removed,
        remaining_after=len(state.remaining_ids),
        capped=capped,
    )


def run_selection(dataset, config, on_step=None):
    """Shrink the feature set of ``dataset`` to ``config.target_count`` features.

    ``on_step`` is called with each StepRecord as soon as the step finishes.
    """
    if config.target_count >= dataset.n_features:
        raise DataError(
            f"target_count {config.target_count} must be below the feature count {dataset.n_features}"
        )
    if dataset.n_classes != 2:
        raise DataError("binary classifier only")
    evaluate = make_evaluator(dataset, config)
    gains = information_gains(dataset, config.n_bins) if config.counter_score_enabled else None
    state = SelectionState(
        remaining_ids=[int(f) for f in dataset.feature_ids],
        rng=_rng.stream(config.seed, "partition"),
    )
    full_count = dataset.n_features
    trace = []
    pool = ThreadPoolExecutor(config.jobs) if config.jobs > 1 else None
    try:
        while len(state.remaining_ids) > config.target_count:
            record = _run_step(state, dataset, config, evaluate, gains, full_count, pool)
            trace.append(record)
            if on_step is not None:
                on_step(record)
    finally:
        if pool is not None:
            pool.shutdown()
    return SelectionResult(list(state.remaining_ids), trace, state.evaluations)
