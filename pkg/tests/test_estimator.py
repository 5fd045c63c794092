import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from securebackscatter import DomainError, SecrecyRateOptimizer
from securebackscatter.estimator import channels_to_matrix, matrix_to_channels
from securebackscatter.model import SystemConfig
from securebackscatter.solver import endpoint_oracle

from conftest import random_channels


@pytest.fixture
def X(rng):
    return channels_to_matrix(random_channels(rng, 40, k_eds=3))


def test_params_round_trip():
    est = SecrecyRateOptimizer(scheme="oma_optimal", p=7.0)
    params = est.get_params()
    assert params["scheme"] == "oma_optimal" and params["p"] == 7.0
    twin = clone(est).set_params(p=3.0)
    assert twin.p == 3.0 and est.p == 7.0


def test_fit_attributes(X):
    est = SecrecyRateOptimizer().fit(X)
    assert est.n_features_in_ == 11 and est.n_eds_ == 3
    assert est.controls_.shape == (40, 2)
    cfg = SystemConfig(k_eds=3)
    expected = [endpoint_oracle(ch, cfg).secrecy for ch in matrix_to_channels(X)]
    np.testing.assert_allclose(est.secrecy_, expected, atol=1e-12)
    assert est.converged_.dtype == bool


def test_predict_transform_score(X):
    est = SecrecyRateOptimizer().fit(X)
    np.testing.assert_array_equal(est.predict(X), est.controls_)
    out = est.fit_transform(X)
    assert out.shape == (40, 3)
    assert est.score(X) == pytest.approx(out[:, 2].mean())


def test_oma_scores_half(X):
    noma = SecrecyRateOptimizer().fit(X).score(X)
    oma = SecrecyRateOptimizer(scheme="oma_optimal").fit(X).score(X)
    assert oma == pytest.approx(noma / 2, rel=1e-12)


def test_not_fitted(X):
    with pytest.raises(NotFittedError):
        SecrecyRateOptimizer().predict(X)


def test_column_mismatch(X):
    est = SecrecyRateOptimizer().fit(X)
    with pytest.raises(ValueError, match="features"):
        est.predict(X[:, :9])


@pytest.mark.parametrize("bad", [np.ones((3, 6)), -np.ones((3, 7)), np.ones((3, 8))])
def test_rejects_bad_layout(bad):
    with pytest.raises(DomainError):
        SecrecyRateOptimizer().fit(bad)


def test_in_pipeline(X):
    pipe = make_pipeline(FunctionTransformer(lambda Z: 2.0 * Z), SecrecyRateOptimizer())
    out = pipe.fit_transform(X)
    direct = SecrecyRateOptimizer().fit_transform(2.0 * X)
    np.testing.assert_array_equal(out, direct)
