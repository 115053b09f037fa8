import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gridmem import (
    CueQuantizer,
    GridRecognizer,
    PairingError,
    QuantizationSpec,
    cue_from_record,
    quantize_values,
    recognize,
)


def blobs(rng, n_labels=3, per_label=25, dims=6, sigma=0.3):
    means = rng.uniform(0, 10, (n_labels, dims))
    X = np.repeat(means, per_label, axis=0) + rng.normal(
        0, sigma, (n_labels * per_label, dims))
    y = np.repeat(np.arange(n_labels), per_label)
    return X, y


class TestCueQuantizer:
    def test_get_set_params_clone(self):
        q = CueQuantizer(levels=8, lo=-1.0, hi=1.0)
        assert q.get_params() == {"levels": 8, "lo": -1.0, "hi": 1.0}
        q2 = clone(q).set_params(levels=2)
        assert q2.levels == 2 and q2.hi == 1.0

    def test_transform_before_fit(self):
        with pytest.raises(NotFittedError):
            CueQuantizer().transform([[1.0, 2.0]])

    def test_transform_matches_library_quantizer(self, rng):
        X = rng.uniform(-2, 12, (30, 5))
        q = CueQuantizer(levels=6).fit(X)
        spec = QuantizationSpec(6, 0.0, 10.0, 5)
        assert np.array_equal(q.transform(X), quantize_values(X, spec))

    def test_feature_count_checked(self, rng):
        X = rng.uniform(0, 10, (10, 4))
        q = CueQuantizer().fit(X)
        with pytest.raises(ValueError):
            q.transform(rng.uniform(0, 10, (10, 5)))

    def test_invalid_params_raise_on_fit(self, rng):
        with pytest.raises(ValueError):
            CueQuantizer(levels=0).fit(rng.uniform(0, 10, (5, 2)))

    def test_fit_transform_pipeline_style(self, rng):
        X = rng.uniform(0, 10, (10, 3))
        out = CueQuantizer(levels=4).fit_transform(X)
        assert out.shape == X.shape
        assert out.min() >= 1 and out.max() <= 4


class TestGridRecognizer:
    def test_params_clone(self):
        est = GridRecognizer(levels=16, pairing=[("0", "5")])
        cloned = clone(est)
        assert cloned.get_params()["levels"] == 16
        assert cloned.get_params()["pairing"] == [("0", "5")]

    def test_training_set_recognized_by_own_register(self, rng):
        X, y = blobs(rng)
        est = GridRecognizer(levels=4).fit(X, y)
        pred = est.predict(X)
        for i, label in enumerate(y):
            j = list(est.classes_).index(label)
            assert pred[i, j] == 1

    def test_predict_matches_memory_layer(self, rng):
        X, y = blobs(rng, n_labels=2, per_label=10)
        est = GridRecognizer(levels=5).fit(X, y)
        spec = QuantizationSpec(5, 0.0, 10.0, X.shape[1])
        Xq = rng.uniform(0, 10, (20, X.shape[1]))
        pred = est.predict(Xq)
        for i, row in enumerate(Xq):
            cue = cue_from_record(row, spec)
            for j, reg in enumerate(est.bank_):
                assert pred[i, j] == int(recognize(reg, cue))

    def test_levels_one_accepts_everything(self, rng):
        X, y = blobs(rng)
        est = GridRecognizer(levels=1).fit(X, y)
        assert est.predict(rng.uniform(0, 10, (7, X.shape[1]))).all()

    def test_well_separated_blobs_accept_selectively(self, rng):
        X, y = blobs(rng, n_labels=2, sigma=0.1)
        est = GridRecognizer(levels=4).fit(X, y)
        pred = est.predict(X)
        own = pred[np.arange(len(y)), [list(est.classes_).index(c) for c in y]]
        assert own.mean() > 0.9

    def test_pairing_groups_columns(self, rng):
        X, y = blobs(rng, n_labels=4)
        est = GridRecognizer(levels=4, pairing=[(0, 2), (1, 3)]).fit(X, y)
        assert est.groups_ == (("0", "2"), ("1", "3"))
        assert est.predict(X[:3]).shape == (3, 2)

    def test_uncovered_label_raises(self, rng):
        X, y = blobs(rng, n_labels=3)
        with pytest.raises(PairingError):
            GridRecognizer(levels=4, pairing=[(0, 1)]).fit(X, y)

    def test_register_entropies(self, rng):
        X, y = blobs(rng)
        est = GridRecognizer(levels=8).fit(X, y)
        ent = est.register_entropies()
        assert ent.shape == (3,)
        assert (ent >= 0).all() and (ent <= 3.0).all()  # log2(8) bound

    def test_predict_before_fit(self):
        with pytest.raises(NotFittedError):
            GridRecognizer().predict([[0.0]])

    def test_y_shape_checked(self, rng):
        X, y = blobs(rng)
        with pytest.raises(ValueError):
            GridRecognizer().fit(X, y[:-1])
