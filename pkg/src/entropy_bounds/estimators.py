"""scikit-learn style wrappers around the functional API.

Rows of ``X`` are probability vectors (spectra or classical distributions).
Both estimators validate with :func:`sklearn.utils.check_array` followed by
:func:`entropy_bounds.simplex.check_prob_rows`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .exceptions import ConditionIndeterminateError
from .extremal import DEFAULT_GRIDSIZE, classify_condition, raw_bounds
from .measures import eval_display, eval_sum_rows, make_measure, undo_display
from .sampling import VIOLATION_THRESHOLD
from .simplex import check_prob_rows


def _validate(est, X, *, reset):
    X = check_array(X, dtype=float, ensure_min_features=2)
    X = check_prob_rows(X)
    if reset:
        est.n_features_in_ = X.shape[1]
    elif X.shape[1] != est.n_features_in_:
        raise ValueError(
            f"X has {X.shape[1]} features, but {type(est).__name__} was fitted "
            f"with {est.n_features_in_}"
        )
    return X


class TraceEntropy(TransformerMixin, BaseEstimator):
    """Map each probability vector to one entropy value.

    Parameters
    ----------
    measure : str
        Measure spec, e.g. ``"shannon"`` or ``"renyi:2"``.
    display : bool
        Report the display coordinate (Renyi entropies) instead of the raw
        trace sum ``sum_i f(p_i)``.
    """

    def __init__(self, measure="shannon", display=True):
        self.measure = measure
        self.display = display

    def fit(self, X, y=None):
        self.measure_ = make_measure(self.measure)
        _validate(self, X, reset=True)
        return self

    def transform(self, X):
        check_is_fitted(self, "measure_")
        X = _validate(self, X, reset=False)
        h = eval_sum_rows(self.measure_, X)
        if self.display:
            h = np.asarray(eval_display(self.measure_, h), dtype=float)
        return h[:, None]

    def get_feature_names_out(self, input_features=None):
        return np.array([f"H[{self.measure_.name}]"], dtype=object)


class EntropyBounds(BaseEstimator):
    """Bounds on ``H_f`` given ``H_g`` for distributions of fixed dimension.

    ``fit`` classifies the pair and fixes the dimension from ``X``.  All
    values going in or out are display coordinates.

    Parameters
    ----------
    f, g : str
        Measure specs for the bounded and the given entropy.
    unchecked : bool
        Allow pairs whose condition is indeterminate; the family envelope is
        then returned, which need not bound anything.
    gridsize : int
        Grid size for the condition check.
    threshold : float
        Slack used by :meth:`predict` and :meth:`score`.

    Attributes
    ----------
    condition_ : ConditionReport
    d_ : int
    n_features_in_ : int
    """

    def __init__(self, f="shannon", g="power:2", unchecked=False,
                 gridsize=DEFAULT_GRIDSIZE, threshold=VIOLATION_THRESHOLD):
        self.f = f
        self.g = g
        self.unchecked = unchecked
        self.gridsize = gridsize
        self.threshold = threshold

    def fit(self, X, y=None):
        X = _validate(self, X, reset=True)
        self.f_, self.g_ = make_measure(self.f), make_measure(self.g)
        self.condition_ = classify_condition(self.f_, self.g_, self.gridsize)
        if not self.condition_.bounding and not self.unchecked:
            raise ConditionIndeterminateError(
                f"pair f={self.f_.name}, g={self.g_.name} is not certified; "
                "set unchecked=True to get the family envelope anyway"
            )
        self.d_ = X.shape[1]
        return self

    def _raw(self, hg_raw):
        return raw_bounds(self.f_, self.g_, self.d_, hg_raw, self.condition_.verdict)

    def _shown(self, lo, hi):
        lo = np.asarray(eval_display(self.f_, lo), dtype=float)
        hi = np.asarray(eval_display(self.f_, hi), dtype=float)
        return (hi, lo) if self.f_.reverses_order else (lo, hi)

    def predict_bounds(self, hg):
        """``(m, 2)`` array of ``[H_f min, H_f max]`` at displayed ``H_g``."""
        check_is_fitted(self, "condition_")
        hg = np.atleast_1d(np.asarray(hg, dtype=float))
        lo, hi = self._raw(np.asarray(undo_display(self.g_, hg), dtype=float))
        return np.column_stack(self._shown(lo, hi))

    def transform(self, X):
        """Columns ``H_g, H_f, H_f min, H_f max`` for each row of ``X``."""
        check_is_fitted(self, "condition_")
        X = _validate(self, X, reset=False)
        hg = eval_sum_rows(self.g_, X)
        hf = eval_sum_rows(self.f_, X)
        lo, hi = self._shown(*self._raw(hg))
        return np.column_stack([
            np.asarray(eval_display(self.g_, hg), dtype=float),
            np.asarray(eval_display(self.f_, hf), dtype=float),
            lo, hi,
        ])

    def predict(self, X):
        """``-1`` below the lower bound, ``+1`` above the upper, ``0`` inside."""
        X = _validate(self, X, reset=False)
        hg = eval_sum_rows(self.g_, X)
        hf = eval_sum_rows(self.f_, X)
        lo, hi = self._raw(hg)
        out = np.where(hf < lo - self.threshold, -1, np.where(hf > hi + self.threshold, 1, 0))
        return -out if self.f_.reverses_order else out

    def score(self, X, y=None):
        """Fraction of rows inside the bounds."""
        return float(np.mean(self.predict(X) == 0))
