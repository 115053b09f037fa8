"""scikit-learn style wrappers around the quantizer and the register bank.

``CueQuantizer`` is a stateless transformer (fit only records the feature
count) and ``GridRecognizer`` is a fit/predict recognizer whose ``predict``
returns a multilabel-style 0/1 indicator matrix with one column per
register: several registers may accept the same sample, and none may. Both
play well with ``get_params``/``set_params``/``clone`` and sklearn input
validation.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import PairingError
from .features import QuantizationSpec, cue_from_record, quantize_values
from .memory import MemoryRegister, RegisterBank, recognize, register_cue
from .ops import entropy


def _check_features(X, n_features: int | None = None) -> np.ndarray:
    X = check_array(X, dtype=float, ensure_2d=True)
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(
            f"X has {X.shape[1]} features, but the estimator was fitted "
            f"with {n_features}"
        )
    return X


class CueQuantizer(TransformerMixin, BaseEstimator):
    """Equal-width quantization of real features into 1-based level indices.

    Parameters
    ----------
    levels : int, number of quantization levels (grid rows).
    lo, hi : floats, declared feature range; values outside are clamped.
    """

    def __init__(self, levels: int = 4, lo: float = 0.0, hi: float = 10.0):
        self.levels = levels
        self.lo = lo
        self.hi = hi

    def _spec(self, n_features: int) -> QuantizationSpec:
        return QuantizationSpec(self.levels, self.lo, self.hi, n_features)

    def fit(self, X, y=None):
        X = _check_features(X)
        self._spec(X.shape[1])  # parameter validation
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_in_")
        X = _check_features(X, self.n_features_in_)
        return quantize_values(X, self._spec(self.n_features_in_))


class GridRecognizer(BaseEstimator):
    """Associative register bank behind a fit/predict interface.

    ``fit`` superposes the quantized cue of every training sample into the
    register owning its label (one register per class, or per group when
    ``pairing`` is given). ``predict`` runs the inclusion test of each
    sample against each register and returns an (n_samples, n_registers)
    indicator matrix; column order follows ``groups_``.
    """

    def __init__(self, levels: int = 4, lo: float = 0.0, hi: float = 10.0,
                 pairing=None):
        self.levels = levels
        self.lo = lo
        self.hi = hi
        self.pairing = pairing

    def fit(self, X, y):
        X = _check_features(X)
        y = np.asarray(y)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError(
                f"y has shape {y.shape}, expected ({X.shape[0]},)"
            )
        spec = QuantizationSpec(self.levels, self.lo, self.hi, X.shape[1])

        self.classes_ = np.unique(y)
        labels = [str(c) for c in y]
        if self.pairing is None:
            groups = tuple((str(c),) for c in self.classes_)
        else:
            groups = tuple(tuple(str(m) for m in g) for g in self.pairing)
            covered = {m for g in groups for m in g}
            missing = sorted(set(labels) - covered)
            if missing:
                raise PairingError(f"labels not covered by pairing: {missing}")

        registers = {g: MemoryRegister.blank(g, spec.n_features, spec.levels)
                     for g in groups}
        owner = {m: g for g in groups for m in g}
        for label, row in zip(labels, X):
            g = owner[label]
            registers[g] = register_cue(registers[g], cue_from_record(row, spec))

        self.groups_ = groups
        self.bank_ = RegisterBank(registers[g] for g in groups)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X) -> np.ndarray:
        """0/1 acceptance indicator of shape (n_samples, len(groups_))."""
        check_is_fitted(self, "bank_")
        X = _check_features(X, self.n_features_in_)
        spec = QuantizationSpec(self.levels, self.lo, self.hi,
                                self.n_features_in_)
        out = np.zeros((X.shape[0], len(self.groups_)), dtype=int)
        for i, row in enumerate(X):
            cue = cue_from_record(row, spec)
            for j, reg in enumerate(self.bank_):
                out[i, j] = int(recognize(reg, cue))
        return out

    def register_entropies(self) -> np.ndarray:
        """Entropy in bits of each register's content, in groups_ order."""
        check_is_fitted(self, "bank_")
        return np.array([entropy(reg.content) for reg in self.bank_])
