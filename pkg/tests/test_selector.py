import numpy as np
import pytest

from sbefs.data import DataError, Dataset
from sbefs.selector import (
    SelectionConfig,
    SelectionState,
    apply_counter_score,
    local_criterion,
    make_evaluator,
    partition_subsets,
    removal_count,
    run_iteration,
    run_selection,
    select_lsf,
    subset_size,
)
from sbefs.synth import SynthSpec, generate

from conftest import planted


def state_with(ids, seed=0, relevance=None):
    s = SelectionState(list(ids), np.random.default_rng(seed))
    s.begin_step(2)
    for f, r in (relevance or {}).items():
        s.contributions[f].append(r)
    return s


class TestSubsetSize:
    @pytest.mark.parametrize("n, size", [(100, 10), (1, 1), (50, 7), (2, 1), (3, 2), (64, 8)])
    def test_rounded_sqrt(self, n, size):
        assert subset_size(n) == size


class TestPartition:
    def test_chunk_sizes(self):
        chunks = partition_subsets(state_with(range(10)), size=3)
        assert [len(c) for c in chunks] == [3, 3, 3, 1]

    def test_is_partition(self):
        chunks = partition_subsets(state_with(range(37), seed=4))
        flat = [f for c in chunks for f in c]
        assert sorted(flat) == list(range(37))
        assert len(flat) == len(set(flat))

    def test_deterministic(self):
        assert partition_subsets(state_with(range(20), 5)) == partition_subsets(state_with(range(20), 5))

    def test_complement_scheme(self):
        chunks = partition_subsets(state_with([3, 5, 8]), scheme="complement")
        assert sorted(map(tuple, chunks)) == [(3, 5), (3, 8), (5, 8)]


class TestRunIteration:
    def test_single_subset_gives_zero_credit(self):
        ds = planted(n_noise=3)
        cfg = SelectionConfig(target_count=1, subset_size_override=4)
        s = state_with(range(4))
        run_iteration(s, ds, cfg)
        assert all(c == [0.0] for c in s.contributions.values())

    def test_one_update_per_feature(self):
        ds = planted(n_noise=9, seed=1)
        cfg = SelectionConfig(target_count=2)
        s = state_with(range(10))
        evaluate = make_evaluator(ds, cfg)
        for it in range(1, 4):
            p = run_iteration(s, ds, cfg, evaluate)
            assert 0.0 <= p <= 1.0
            assert all(len(c) == it for c in s.contributions.values())
        assert len(s.step_scores) == 3
        assert s.step_counts.total == 3 * 4 * ds.n_samples

    def test_predictive_feature_earns_more(self):
        wins = 0
        for seed in range(10):
            ds = planted(n_per_class=40, n_noise=1, shift=1.5, seed=seed)
            cfg = SelectionConfig(target_count=1, seed=seed)
            s = state_with([0, 1], seed=seed)
            evaluate = make_evaluator(ds, cfg)
            for _ in range(10):
                run_iteration(s, ds, cfg, evaluate)
            r = s.relevance
            wins += r[0] > r[1]
        assert wins >= 9

    def test_at_target(self):
        with pytest.raises(DataError):
            run_iteration(state_with([0, 1]), planted(), SelectionConfig(target_count=2))


class TestLocalCriterion:
    def test_flat(self):
        assert local_criterion([0.8, 0.8, 0.8]) == 0.0

    def test_two_points(self):
        assert local_criterion([0.6, 0.8]) == pytest.approx(0.1, abs=1e-12)

    def test_three_points(self):
        assert local_criterion([0.5, 0.7, 0.9]) == pytest.approx(0.163299316, abs=1e-6)

    def test_too_short(self):
        with pytest.raises(ValueError):
            local_criterion([0.5])


class TestCounterScore:
    def test_alpha_formula(self):
        ids = list(range(50))
        s = state_with(ids, relevance={0: 2.0, 1: -1.0})
        alpha = apply_counter_score(s, {f: 0.5 for f in ids}, full_count=100)
        assert alpha == 1.0
        assert s.relevance[0] == 2.5
        assert s.relevance[1] == -0.5
        assert s.relevance[7] == 0.5

    def test_negative_relevance_clamps(self):
        s = state_with([0, 1], relevance={0: -0.3, 1: -0.1})
        before = s.relevance
        assert apply_counter_score(s, {0: 1.0, 1: 0.2}, full_count=2) == 0.0
        assert s.relevance == before

    def test_disabled(self):
        s = state_with([0, 1], relevance={0: 1.0, 1: 0.0})
        assert apply_counter_score(s, {0: 1.0, 1: 1.0}, 2, enabled=False) == 0.0
        assert s.relevance == {0: 1.0, 1: 0.0}

    def test_alpha_shrinks_with_remaining(self):
        alphas = []
        for n in (100, 80, 60, 40):
            s = state_with(range(n), relevance={0: 2.0})
            alphas.append(apply_counter_score(s, {f: 1.0 for f in range(n)}, full_count=100))
        assert all(a > b for a, b in zip(alphas, alphas[1:]))

    def test_equal_scores_keep_order(self):
        s = state_with([0, 1, 2], relevance={0: 0.3, 1: 0.1, 2: 0.2})
        apply_counter_score(s, {0: 0.4, 1: 0.4, 2: 0.4}, full_count=3)
        r = s.relevance
        assert r[0] > r[2] > r[1]


class TestRemoval:
    @pytest.mark.parametrize("n, target, fraction, m", [
        (200, 10, 0.05, 10), (12, 10, 0.05, 1), (12, 10, 0.5, 2), (15, 1, 0.05, 1), (60, 1, 0.05, 3), (11, 10, 1.0, 1),
    ])
    def test_removal_count(self, n, target, fraction, m):
        assert removal_count(n, target, fraction) == m

    def test_lowest_removed(self):
        s = state_with(["a", "b", "c"], relevance={"a": 0.5, "b": -0.2, "c": 0.1})
        assert [f for f, _ in select_lsf(s, 1)] == ["b"]
        assert s.remaining_ids == ["a", "c"]

    def test_tie_goes_to_smaller_id(self):
        s = state_with([7, 3])
        assert [f for f, _ in select_lsf(s, 1)] == [3]

    def test_cardinality(self):
        s = state_with([0, 1, 2], relevance={0: 0.1, 1: 0.2, 2: 0.3})
        assert len(select_lsf(s, 2)) == 2
        assert s.remaining_ids == [2]

    def test_too_many(self):
        with pytest.raises(ValueError):
            select_lsf(state_with([0, 1]), 2)


class TestRunSelection:
    def test_planted_pair_recovered(self):
        hits = 0
        for seed in range(10):
            ds, relevant, _ = generate(SynthSpec(n_per_class=60, n_relevant=2, n_irrelevant=6,
                                                 separation=2.0, seed=seed))
            result = run_selection(ds, SelectionConfig(target_count=2, seed=seed))
            hits += sorted(result.selected_ids) == relevant
        assert hits >= 8

    def test_single_step(self):
        ds = planted(n_noise=4)
        result = run_selection(ds, SelectionConfig(target_count=4))
        assert len(result.trace) == 1
        assert len(result.trace[0].removed) == 1

    def test_deterministic_and_conserving(self):
        ds = planted(n_noise=11, seed=3)
        cfg = SelectionConfig(target_count=3, seed=21)
        a, b = run_selection(ds, cfg), run_selection(ds, cfg)
        assert a == b
        removed = a.removed_order
        assert sorted(removed + a.selected_ids) == list(range(12))
        counts = [rec.remaining_after for rec in a.trace]
        assert all(x > y for x, y in zip([12] + counts, counts))

    def test_parallel_matches_serial(self):
        ds = planted(n_noise=9, seed=2)
        serial = run_selection(ds, SelectionConfig(target_count=3, seed=4))
        parallel = run_selection(ds, SelectionConfig(target_count=3, seed=4, jobs=3))
        assert serial.selected_ids == parallel.selected_ids
        assert serial.trace == parallel.trace

    def test_iteration_cap(self):
        ds = planted(n_noise=5, seed=6)
        cfg = SelectionConfig(target_count=5, local_threshold=1e-12, max_iterations_per_step=7)
        rec = run_selection(ds, cfg).trace[0]
        assert rec.capped and rec.iterations == 7

    def test_whole_set_as_one_subset_degenerates_to_id_order(self):
        # One subset holding every feature gives all features the same credit,
        # so removal falls back to the ID tie-break.
        ds = planted(n_noise=5, seed=1)
        cfg = SelectionConfig(target_count=1, subset_size_override=6, removal_fraction=1e-9,
                              counter_score_enabled=False, validation="holdout")
        assert run_selection(ds, cfg).removed_order == [0, 1, 2, 3, 4]

    def test_target_must_be_below_width(self):
        with pytest.raises(DataError):
            run_selection(planted(n_noise=1), SelectionConfig(target_count=2))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SelectionConfig(target_count=1, min_iterations_per_step=1)
        with pytest.raises(ValueError):
            SelectionConfig(target_count=1, subset_scheme="sideways")
