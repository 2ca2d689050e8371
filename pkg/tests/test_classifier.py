import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sbefs.classifier import (
    ConfusionCounts,
    LinearModel,
    TrainConfig,
    _fit_arrays,
    _signed,
    kfold_confusion,
    objective,
    predict,
    stratified_folds,
    train,
    uar,
)
from sbefs.data import DataError, Dataset, Standardizer, _fit, project


def counts(*pairs):
    return ConfusionCounts(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))


def identity_std(d):
    return Standardizer(np.zeros(d), np.ones(d))


class TestUar:
    def test_mixed(self):
        assert uar(counts((9, 1), (7, 3))) == 0.8

    def test_perfect(self):
        assert uar(counts((4, 0), (6, 0))) == 1.0

    def test_degenerate_classifier(self):
        assert uar(counts((0, 5), (5, 0))) == 0.5

    def test_empty_class(self):
        with pytest.raises(ValueError, match="class 1"):
            uar(counts((3, 1), (0, 0)))

    @given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)).filter(lambda p: sum(p) > 0),
                    min_size=2, max_size=6),
           st.integers(1, 9), st.randoms())
    def test_permutation_and_scale_invariant(self, pairs, scale, rnd):
        base = uar(counts(*pairs))
        shuffled = list(pairs)
        rnd.shuffle(shuffled)
        assert uar(counts(*shuffled)) == pytest.approx(base, abs=1e-12)
        assert uar(counts(*[(a * scale, b * scale) for a, b in pairs])) == pytest.approx(base, abs=1e-12)

    def test_merge_is_addition(self):
        a, b = counts((1, 2), (3, 4)), counts((5, 0), (0, 6))
        assert (a + b).correct.tolist() == [6, 3]
        assert (a + b).wrong.tolist() == [2, 10]
        assert (a + b).total == a.total + b.total


class TestTrain:
    def test_separable_pair(self):
        ds = Dataset(np.array([[-1.0], [1.0]]), [0, 1])
        view = project(ds, [0])
        model = train(view, [0, 1], TrainConfig(C=1.0, epochs=100))
        assert [predict(model, view, r) for r in (0, 1)] == [0, 1]

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        ds = Dataset(rng.normal(size=(40, 3)), np.arange(40) % 2)
        view = project(ds, [0, 1, 2])
        a = train(view, range(40), TrainConfig(seed=7))
        b = train(view, range(40), TrainConfig(seed=7))
        assert a.weights.tobytes() == b.weights.tobytes()
        assert a.bias == b.bias

    def test_single_class_rows(self, tiny):
        with pytest.raises(DataError, match="single class"):
            train(project(tiny, [0]), [0, 1], TrainConfig())

    def test_multiclass_rejected(self):
        ds = Dataset(np.arange(6.0)[:, None], [0, 1, 2, 0, 1, 2])
        with pytest.raises(DataError, match="binary classifier only"):
            train(project(ds, [0]), range(6), TrainConfig())

    def test_bad_config(self):
        with pytest.raises(ValueError):
            TrainConfig(C=0)
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)

    def test_objective_not_worse_than_start(self):
        # Starting point w = 0, b = 0 has objective exactly 1.
        for seed in range(50):
            rng = np.random.default_rng(seed)
            n, d = int(rng.integers(10, 200)), int(rng.integers(1, 20))
            x = rng.normal(size=(n, d))
            y = np.arange(n) % 2
            if seed % 2:
                x[:, 0] += y * rng.uniform(0, 3)
            z = _fit(x).transform(x)
            ys = _signed(y)
            w, b = _fit_arrays(z, ys, TrainConfig(seed=seed))
            lam = 1.0 / n
            assert objective(np.zeros(d), 0.0, z, ys, lam) == 1.0
            assert objective(w, b, z, ys, lam) <= 1.0


class TestPredict:
    @pytest.mark.parametrize("w, b, x, expected", [([1.0], 0.0, 2.0, 1), ([1.0], 0.0, 0.0, 0), ([-3.0], 1.0, 1.0, 0)])
    def test_sign_rule(self, w, b, x, expected):
        ds = Dataset(np.array([[x], [x]]), [0, 1])
        model = LinearModel(np.array(w), b, (0,), identity_std(1))
        assert predict(model, project(ds, [0]), 0) == expected

    def test_id_mismatch(self, tiny):
        model = LinearModel(np.array([1.0]), 0.0, (0,), identity_std(1))
        with pytest.raises(DataError):
            predict(model, project(tiny, [1]), 0)

    def test_positive_rescaling_preserves_predictions(self):
        rng = np.random.default_rng(3)
        ds = Dataset(rng.normal(size=(30, 4)), np.arange(30) % 2)
        view = project(ds, range(4))
        model = train(view, range(30), TrainConfig())
        scaled = LinearModel(model.weights * 7.5, model.bias * 7.5, model.active_ids, model.standardizer)
        assert [predict(model, view, r) for r in range(30)] == [predict(scaled, view, r) for r in range(30)]


class TestKfold:
    def test_predictive_feature(self):
        rng = np.random.default_rng(0)
        labels = np.repeat([0, 1], 50)
        ds = Dataset((labels + 0.01 * rng.standard_normal(100))[:, None], labels)
        assert uar(kfold_confusion(project(ds, [0]), 2, TrainConfig(), seed=1)) >= 0.95

    @pytest.mark.parametrize("k", [2, 3, 5, 7])
    def test_every_row_evaluated_once(self, k):
        rng = np.random.default_rng(k)
        ds = Dataset(rng.normal(size=(43, 2)), (np.arange(43) % 3 == 0).astype(int))
        c = kfold_confusion(project(ds, [0, 1]), k, TrainConfig(), seed=5)
        assert c.total == 43
        np.testing.assert_array_equal(c.correct + c.wrong, np.bincount(ds.labels))

    def test_folds_partition_and_stratify(self):
        labels = np.array([0] * 30 + [1] * 12)
        folds = stratified_folds(labels, 3, seed=4)
        assert sorted(np.unique(folds)) == [0, 1, 2]
        for f in range(3):
            assert np.bincount(labels[folds == f], minlength=2).tolist() == [10, 4]

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        ds = Dataset(rng.normal(size=(60, 3)), np.arange(60) % 2)
        view = project(ds, [2, 0])
        a = kfold_confusion(view, 3, TrainConfig(seed=11), seed=9)
        b = kfold_confusion(view, 3, TrainConfig(seed=11), seed=9)
        assert a.to_dict() == b.to_dict()

    def test_class_smaller_than_k(self):
        ds = Dataset(np.arange(7.0)[:, None], [0, 0, 0, 0, 0, 1, 1])
        with pytest.raises(DataError, match="class 1 has 2 samples, fewer than k=3"):
            kfold_confusion(project(ds, [0]), 3, TrainConfig(), seed=0)
