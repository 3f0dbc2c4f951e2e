import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from entropy_bounds.estimators import EntropyBounds, TraceEntropy
from entropy_bounds.exceptions import ConditionIndeterminateError, SumNotOneError
from entropy_bounds.sampling import SampleConfig, sample_array


@pytest.fixture(scope="module")
def X():
    return sample_array(SampleConfig(d=4, n=2000, seed=21))


def test_trace_entropy(X):
    t = TraceEntropy("shannon").fit(X)
    assert t.n_features_in_ == 4
    out = t.transform(np.full((2, 4), 0.25))
    np.testing.assert_allclose(out, [[2.0], [2.0]])
    assert t.get_feature_names_out().tolist() == ["H[shannon]"]


def test_trace_entropy_display(X):
    p = np.full((1, 4), 0.25)
    assert TraceEntropy("renyi:2").fit(X).transform(p)[0, 0] == pytest.approx(2.0)
    assert TraceEntropy("renyi:2", display=False).fit(X).transform(p)[0, 0] == pytest.approx(0.25)


def test_validation(X):
    t = TraceEntropy().fit(X)
    with pytest.raises(SumNotOneError):
        t.transform([[0.7, 0.4, 0.0, 0.0]])
    with pytest.raises(ValueError):
        t.transform([[0.5, 0.5]])
    with pytest.raises(NotFittedError):
        TraceEntropy().transform(X)


def test_params_and_clone():
    e = EntropyBounds(f="tsallis:2", g="shannon", unchecked=True)
    params = e.get_params()
    assert params["f"] == "tsallis:2" and params["unchecked"] is True
    c = clone(e)
    assert c.get_params() == params and c is not e
    e.set_params(g="power:2")
    assert e.g == "power:2"


def test_bounds_fit_and_predict(X):
    e = EntropyBounds().fit(X)
    assert e.d_ == 4 and e.condition_.verdict.value == "StrictlyConvex"
    lo, hi = e.predict_bounds([0.25])[0]
    assert lo == pytest.approx(2.0) and hi == pytest.approx(2.0)
    assert e.score(X) == 1.0
    assert set(np.unique(e.predict(X))) == {0}


def test_bounds_transform_columns(X):
    e = EntropyBounds().fit(X)
    T = e.transform(X[:50])
    assert T.shape == (50, 4)
    assert np.all(T[:, 2] <= T[:, 1] + 1e-9) and np.all(T[:, 1] <= T[:, 3] + 1e-9)


def test_bounds_renyi_display(X):
    e = EntropyBounds(f="renyi:2", g="shannon").fit(X)
    T = e.transform(X[:200])
    assert np.all(T[:, 2] <= T[:, 1] + 1e-9) and np.all(T[:, 1] <= T[:, 3] + 1e-9)
    assert e.score(X) == 1.0


def test_bounds_indeterminate(X):
    with pytest.raises(ConditionIndeterminateError):
        EntropyBounds(g="peculiar:10").fit(X)
    e = EntropyBounds(g="peculiar:10", unchecked=True).fit(X)
    assert not e.condition_.bounding


def test_pipeline():
    X = sample_array(SampleConfig(d=3, n=10, seed=0))
    out = make_pipeline(TraceEntropy("power:2", display=False)).fit_transform(X)
    np.testing.assert_allclose(out[:, 0], np.sum(X**2, axis=1))
    assert math.isfinite(out.sum())
