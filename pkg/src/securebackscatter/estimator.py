"""scikit-learn style wrapper around the per-instance secrecy optimizers.

Rows of ``X`` are flattened channel realizations
``[g_n, g_f, g_b, h_n, h_f, g_1, h_1, ..., g_K, h_K]``.  There is nothing to
learn across rows: every row is optimized on its own, so ``predict`` and
``transform`` work on any batch with the fitted column layout.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import DomainError, check_channel_matrix
from .baselines import SchemeKind, run_scheme
from .model import ChannelRealization, SystemConfig


def channels_to_matrix(channels):
    rows = [ch.to_row() for ch in channels]
    if len({len(r) for r in rows}) > 1:
        raise DomainError("all realizations must have the same eavesdropper count")
    return np.vstack(rows)


def matrix_to_channels(X):
    X, _ = check_channel_matrix(X)
    return [ChannelRealization.from_row(row) for row in X]


class SecrecyRateOptimizer(TransformerMixin, BaseEstimator):
    """Secrecy-rate maximizing reflection and power split per channel instance.

    Parameters
    ----------
    scheme : {'noma_optimal', 'noma_suboptimal', 'oma_optimal'}, default='noma_optimal'
    p : float, default=10.0
        BS power budget in watts.
    sigma2 : float, default=1.0
        Noise variance in watts.
    tol, max_iters, step0 : solver controls of the dual method.
    fixed_omega : float, default=0.25
        Power split held fixed by ``noma_suboptimal``.
    oma_interference_mode : {'cancel', 'noise'}, default='cancel'

    Attributes
    ----------
    n_features_in_ : int
    n_eds_ : int
        Eavesdropper count implied by the column layout.
    controls_ : ndarray of shape (n_samples, 2)
        ``(alpha, omega)`` found for each training row.
    secrecy_ : ndarray of shape (n_samples,)
    n_iter_ : ndarray of shape (n_samples,)
    converged_ : ndarray of shape (n_samples,)
    """

    def __init__(
        self,
        scheme="noma_optimal",
        p=10.0,
        sigma2=1.0,
        tol=1e-6,
        max_iters=200,
        step0=0.1,
        fixed_omega=0.25,
        oma_interference_mode="cancel",
    ):
        self.scheme = scheme
        self.p = p
        self.sigma2 = sigma2
        self.tol = tol
        self.max_iters = max_iters
        self.step0 = step0
        self.fixed_omega = fixed_omega
        self.oma_interference_mode = oma_interference_mode

    def _config(self, n_eds):
        return SystemConfig(
            p=self.p,
            sigma2=self.sigma2,
            k_eds=n_eds,
            tol=self.tol,
            max_iters=self.max_iters,
            step0=self.step0,
            fixed_omega=self.fixed_omega,
            oma_interference_mode=self.oma_interference_mode,
        )

    def _solve_rows(self, X, n_eds):
        kind = SchemeKind.parse(self.scheme)
        cfg = self._config(n_eds)
        return [run_scheme(kind, ChannelRealization.from_row(row), cfg) for row in X]

    def _check_X(self, X):
        check_is_fitted(self, "n_features_in_")
        X, n_eds = check_channel_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_} features as input"
            )
        return X, n_eds

    def fit(self, X, y=None):
        X, n_eds = check_channel_matrix(X)
        results = self._solve_rows(X, n_eds)
        self.n_features_in_ = X.shape[1]
        self.n_eds_ = n_eds
        self.controls_ = np.array([[r.controls.alpha, r.controls.omega] for r in results])
        self.secrecy_ = np.array([r.secrecy for r in results])
        self.n_iter_ = np.array([r.iterations for r in results])
        self.converged_ = np.array([r.converged for r in results])
        return self

    def predict(self, X):
        """Optimal ``(alpha, omega)`` for each row, shape (n_samples, 2)."""
        X, n_eds = self._check_X(X)
        results = self._solve_rows(X, n_eds)
        return np.array([[r.controls.alpha, r.controls.omega] for r in results])

    def transform(self, X):
        """``(alpha, omega, secrecy)`` columns for each row."""
        X, n_eds = self._check_X(X)
        results = self._solve_rows(X, n_eds)
        return np.array([[r.controls.alpha, r.controls.omega, r.secrecy] for r in results])

    def score(self, X, y=None):
        """Mean achieved secrecy rate in bits/s/Hz."""
        return float(self.transform(X)[:, 2].mean())
