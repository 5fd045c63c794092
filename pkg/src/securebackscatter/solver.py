"""Lagrangian dual method for joint reflection / power-split secrecy maximization.

The primal problem maximizes the backscatter secrecy rate over the BN
reflection coefficient ``alpha`` in [0, 1] and the near-user power share
``omega`` in (0, 0.5].  Multipliers ``zeta`` (reflection bound) and ``lam``
(NOMA power ordering) are driven by projected subgradient steps with a
diminishing ``step0 / sqrt(j)`` schedule.  Each iteration takes the
closed-form primal candidates, screens them against the Lagrangian, updates
the multipliers and stops once the primal and dual values settle.

Two independent oracles are provided for validation: an exhaustive
``(alpha, omega)`` lattice scan and the analytic endpoint rule.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    OMEGA_CEIL,
    OMEGA_FLOOR,
    DomainError,
    check_positive_int,
    clamp_omega,
)
from .model import (
    ControlVariables,
    backscatter_gains,
    secrecy_objective,
    secrecy_rate,
)

ZETA0 = 1.0
LAMBDA0 = 1.0
ALPHA0 = 0.5
OMEGA0 = 0.25
STABLE_ITERS = 3


class DegenerateMultiplier(DomainError):
    """A closed-form step was asked to divide by a zero multiplier."""


@dataclass(frozen=True)
class DualState:
    zeta: float = ZETA0
    lam: float = LAMBDA0
    iter: int = 1
    step: float = 0.1

    def __post_init__(self):
        if self.zeta < 0 or self.lam < 0:
            raise DomainError("dual multipliers must be non-negative")
        if not self.step > 0:
            raise DomainError("step size must be positive")


@dataclass(frozen=True)
class TraceRow:
    iter: int
    alpha: float
    omega: float
    zeta: float
    lam: float
    objective: float
    dual_value: float
    best: float


@dataclass(frozen=True)
class SolveResult:
    controls: ControlVariables
    secrecy: float
    iterations: int
    converged: bool
    trace: tuple = field(default=(), repr=False)

    def to_dict(self):
        return {
            "alpha": self.controls.alpha,
            "omega": self.controls.omega,
            "secrecy": self.secrecy,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": [vars(row) for row in self.trace],
        }


def pi_coefficients(ch, cfg, ed_index=None):
    """Coefficients of the quadratic behind the closed-form reflection step.

    ``ed_index`` defaults to the strongest eavesdropper.  The BN-side gain
    written ``|H_b|^2`` in the original expressions is taken to be ``g_b``.
    """
    if ed_index is None:
        ed_index = backscatter_gains(ch, cfg)[2]
    g_k, h_k = ch.ed_links[ed_index]
    p, s2, g_b, h_n = cfg.p, cfg.sigma2, ch.g_b, ch.h_n
    pi1 = g_b**2 * p**2 * h_n * h_k
    pi2 = g_b**2 * p**2 * h_n + h_n * g_b * p * s2 + h_k * g_b * p * s2
    pi3 = h_k * g_b * s2 - h_n * g_b**2 * p - h_n * g_b * s2
    return pi1, pi2, pi3


def _quadratic_roots(q2, q1, q0):
    if q2 == 0.0:
        return () if q1 == 0.0 else (-q0 / q1,)
    disc = q1 * q1 - 4.0 * q2 * q0
    if disc < 0.0:
        return ()
    sq = math.sqrt(disc)
    return ((-q1 + sq) / (2.0 * q2), (-q1 - sq) / (2.0 * q2))


def _alpha_candidates(pis, zeta, prep):
    """Interval endpoints plus the clamped stationarity roots inside [0, 1]."""
    candidates = [0.0, 1.0]
    if zeta > 0.0:
        pi1, pi2, pi3 = pis
        const = prep.g_b2_p_s2 + prep.p * pi3 / zeta
        for root in _quadratic_roots(pi1, pi2, const):
            root = max(0.0, root)
            if math.isfinite(root) and root <= 1.0:
                candidates.append(root)
    return candidates


def _lagrangian_argmax(candidates, a, b, zeta):
    # max() keeps the first of equal values, so boundaries win ties.
    return max(candidates, key=lambda x: secrecy_objective(x, a, b) - zeta * (x - 1.0))


class _Prepared:
    """Per-instance scalars reused by every iteration."""

    __slots__ = ("p", "sigma2", "g_b2_p_s2", "omega_num")

    def __init__(self, ch, cfg, k):
        g_k, h_k = ch.ed_links[k]
        self.p = cfg.p
        self.sigma2 = cfg.sigma2
        self.g_b2_p_s2 = ch.g_b**2 * cfg.p * cfg.sigma2
        # alpha-free part of the omega numerator
        self.omega_num = (h_k + 1.0) * ch.h_n * ch.g_b**2 * cfg.p**3 * h_k * g_k


def closed_form_alpha(ch, cfg, dual):
    """Closed-form reflection coefficient for the current multipliers.

    Both roots of the stationarity quadratic are clamped at zero, the ones
    inside [0, 1] are screened together with the two interval endpoints, and
    the candidate with the largest Lagrangian value is returned.

    Raises
    ------
    DegenerateMultiplier
        If ``dual.zeta`` is zero; the caller then falls back to the endpoint rule.
    """
    if dual.zeta <= 0.0:
        raise DegenerateMultiplier("zeta = 0: reflection step is unconstrained")
    a, b, k = backscatter_gains(ch, cfg)
    candidates = _alpha_candidates(pi_coefficients(ch, cfg, k), dual.zeta, _Prepared(ch, cfg, k))
    return _lagrangian_argmax(candidates, a, b, dual.zeta)


def _omega_raw(num, alpha, lam, p):
    return max(0.0, num * alpha * alpha / (lam * p))


def closed_form_omega(ch, cfg, alpha, dual, clamp=True):
    """Closed-form near-user power share, projected into ``[1e-9, 0.5]``.

    The secrecy objective does not depend on ``omega``; the value is kept for
    diagnostics and for the power-ordering multiplier update.
    """
    if dual.lam <= 0.0:
        raise DegenerateMultiplier("lambda = 0: power split defaults to 0.5")
    k = backscatter_gains(ch, cfg)[2]
    raw = _omega_raw(_Prepared(ch, cfg, k).omega_num, alpha, dual.lam, cfg.p)
    return clamp_omega(raw) if clamp else raw


def dual_update(dual, alpha, omega, cfg):
    """One projected subgradient step on both multipliers."""
    zeta = max(0.0, dual.zeta + dual.step * (alpha - 1.0))
    lam = max(0.0, dual.lam + dual.step * (cfg.p * omega - cfg.p * (1.0 - omega)))
    j = dual.iter + 1
    return DualState(zeta=zeta, lam=lam, iter=j, step=cfg.step0 / math.sqrt(j))


def _dual_loop(ch, cfg, fixed_omega=None):
    a, b, k = backscatter_gains(ch, cfg)
    pis = pi_coefficients(ch, cfg, k)
    prep = _Prepared(ch, cfg, k)
    p = cfg.p

    dual = DualState(zeta=ZETA0, lam=LAMBDA0, iter=1, step=cfg.step0)
    alpha = ALPHA0
    omega = OMEGA0 if fixed_omega is None else fixed_omega
    best = (-math.inf, alpha, omega)
    prev_obj = prev_dual = None
    stable = 0
    converged = False
    rows = []

    for j in range(1, cfg.max_iters + 1):
        candidates = _alpha_candidates(pis, dual.zeta, prep)
        alpha = _lagrangian_argmax(candidates, a, b, dual.zeta)
        if fixed_omega is not None:
            omega = fixed_omega
        elif dual.lam > 0.0:
            omega = clamp_omega(_omega_raw(prep.omega_num, alpha, dual.lam, p))
        else:
            omega = OMEGA_CEIL

        objective = max(0.0, secrecy_objective(alpha, a, b))
        power_gap = p * omega - p * (1.0 - omega)
        dual_value = (
            secrecy_objective(alpha, a, b)
            - dual.zeta * (alpha - 1.0)
            - dual.lam * power_gap
        )
        # every screened candidate is primal feasible; keep the best one seen
        top = max(candidates, key=lambda x: secrecy_objective(x, a, b))
        top_value = max(0.0, secrecy_objective(top, a, b))
        if top_value > best[0]:
            best = (top_value, top, omega)

        if fixed_omega is None:
            dual = dual_update(dual, alpha, omega, cfg)
        else:
            # power-ordering branch frozen: only zeta moves
            zeta = max(0.0, dual.zeta + dual.step * (alpha - 1.0))
            dual = DualState(zeta, dual.lam, j + 1, cfg.step0 / math.sqrt(j + 1))

        rows.append(TraceRow(j, alpha, omega, dual.zeta, dual.lam, objective, dual_value, best[0]))

        residual = max(alpha - 1.0, 0.0, power_gap)
        if (
            prev_obj is not None
            and abs(objective - prev_obj) < cfg.tol
            and abs(dual_value - prev_dual) < cfg.tol
            and residual < cfg.tol
        ):
            stable += 1
        else:
            stable = 0
        prev_obj, prev_dual = objective, dual_value
        if stable >= STABLE_ITERS:
            converged = True
            break

    controls = ControlVariables(best[1], best[2])
    return SolveResult(
        controls=controls,
        secrecy=secrecy_rate(ch, cfg, controls),
        iterations=len(rows),
        converged=converged,
        trace=tuple(rows),
    )


def solve_dual(ch, cfg):
    """Jointly optimize reflection and power split with the Lagrangian dual method.

    Parameters
    ----------
    ch : ChannelRealization
    cfg : SystemConfig
        ``tol``, ``max_iters`` and ``step0`` control the iteration.

    Returns
    -------
    SolveResult
        The best feasible iterate.  ``converged`` is False if ``max_iters``
        was reached before the primal and dual values settled.
    """
    return _dual_loop(ch, cfg)


def _lattice_secrecy(ch, cfg, alphas, omegas):
    # Evaluated from the unsimplified SINR expressions, independently of model.py.
    A, W = np.meshgrid(alphas, omegas, indexing="ij")
    p, s2 = cfg.p, cfg.sigma2
    total = p * W + p * (1.0 - W)
    legit = ch.h_n * A * ch.g_b * total / s2
    g = np.array([lk[0] for lk in ch.ed_links])[:, None, None]
    h = np.array([lk[1] for lk in ch.ed_links])[:, None, None]
    eaves = (h * A * ch.g_b * total / (g * total + s2)).max(axis=0)
    return np.maximum(0.0, np.log2(1.0 + legit) - np.log2(1.0 + eaves))


def grid_oracle(ch, cfg, n_alpha=201, n_omega=201):
    """Exhaustive lattice search over ``alpha`` in [0, 1] and ``omega`` in [1e-9, 0.5].

    Ties go to the smallest ``alpha``, then the smallest ``omega``.
    """
    n_alpha = check_positive_int("n_alpha", n_alpha, minimum=2)
    n_omega = check_positive_int("n_omega", n_omega, minimum=2)
    alphas = np.linspace(0.0, 1.0, n_alpha)
    omegas = np.linspace(OMEGA_FLOOR, OMEGA_CEIL, n_omega)
    values = _lattice_secrecy(ch, cfg, alphas, omegas)
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    return SolveResult(
        controls=ControlVariables(float(alphas[i]), float(omegas[j])),
        secrecy=float(values[i, j]),
        iterations=n_alpha * n_omega,
        converged=True,
    )


def endpoint_value(a, b):
    """Optimal ``(alpha, secrecy)`` of ``log2(1+a*alpha) - log2(1+b*alpha)`` on [0, 1].

    The objective is monotone in ``alpha`` with the sign of ``a - b``.
    """
    if a > b:
        return 1.0, math.log2((1.0 + a) / (1.0 + b))
    return 0.0, 0.0


def endpoint_oracle(ch, cfg):
    """Exact optimum of the secrecy objective from the endpoint rule."""
    a, b, _ = backscatter_gains(ch, cfg)
    alpha, value = endpoint_value(a, b)
    return SolveResult(
        controls=ControlVariables(alpha, OMEGA_CEIL),
        secrecy=value,
        iterations=0,
        converged=True,
    )


def lattice_cell_variation(ch, cfg, n_alpha=201):
    """Largest objective change across one ``alpha`` cell of the oracle lattice."""
    a, b, _ = backscatter_gains(ch, cfg)
    alphas = np.linspace(0.0, 1.0, check_positive_int("n_alpha", n_alpha, minimum=2))
    f = np.maximum(0.0, np.log2(1.0 + a * alphas) - np.log2(1.0 + b * alphas))
    return float(np.max(np.abs(np.diff(f))))


__all__ = [
    "DegenerateMultiplier",
    "DualState",
    "SolveResult",
    "TraceRow",
    "closed_form_alpha",
    "closed_form_omega",
    "dual_update",
    "endpoint_oracle",
    "endpoint_value",
    "grid_oracle",
    "lattice_cell_variation",
    "pi_coefficients",
    "solve_dual",
]
