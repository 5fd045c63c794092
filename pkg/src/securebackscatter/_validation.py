"""Input validation helpers shared by the model, solvers and estimator."""

import math

import numpy as np

OMEGA_FLOOR = 1e-9
OMEGA_CEIL = 0.5


class DomainError(ValueError):
    """Raised when an argument falls outside the physical or numerical domain."""


def check_nonnegative(name, value):
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be a finite value >= 0, got {value!r}")
    return value


def check_positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a finite value > 0, got {value!r}")
    return value


def check_positive_int(name, value, minimum=1):
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_alpha(alpha):
    alpha = float(alpha)
    if not (0.0 <= alpha <= 1.0):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    return alpha


def check_omega(omega):
    omega = float(omega)
    if not (OMEGA_FLOOR <= omega <= OMEGA_CEIL):
        raise DomainError(
            f"omega must lie in [{OMEGA_FLOOR:g}, {OMEGA_CEIL}], got {omega!r}"
        )
    return omega


def clamp_omega(omega):
    """Project a raw power-split value into the admissible NOMA range."""
    if not math.isfinite(omega):
        return OMEGA_CEIL if omega > 0 else OMEGA_FLOOR
    return min(max(omega, OMEGA_FLOOR), OMEGA_CEIL)


def check_channel_matrix(X):
    """Validate a batch of flattened channel realizations.

    Each row is ``[g_n, g_f, g_b, h_n, h_f, g_1, h_1, ..., g_K, h_K]``, i.e.
    five fixed columns followed by one (BS->ED, BN->ED) pair per eavesdropper.

    Returns
    -------
    X : ndarray of shape (n_instances, 5 + 2K)
    n_eds : int
    """
    from sklearn.utils.validation import check_array

    X = check_array(X, dtype=np.float64, ensure_2d=True)
    n_cols = X.shape[1]
    if n_cols < 7 or (n_cols - 5) % 2:
        raise DomainError(
            f"channel rows need 5 + 2K columns with K >= 1, got {n_cols} columns"
        )
    if np.any(X < 0):
        raise DomainError("channel gains must be non-negative")
    return X, (n_cols - 5) // 2
