"""Signal model for a two-user NOMA downlink with an ambient backscatter node.

A base station (BS) superimposes messages for a near user ``U_n`` and a far
user ``U_f``.  A backscatter node (BN) reflects a fraction ``alpha`` of the
incident signal toward ``U_n`` while ``K`` non-colluding eavesdroppers listen.
Every quantity here is a function of squared channel magnitudes only.

Because the two NOMA power shares always sum to the full budget, the
backscatter SINRs (legitimate and eavesdropper) reduce to expressions in
``p`` alone and never see the power split ``omega``.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import (
    DomainError,
    check_alpha,
    check_nonnegative,
    check_omega,
    check_positive,
    check_positive_int,
)

LINK_ROLES = ("gn", "gf", "gb", "hn", "hf", "gk", "hk")
OMA_MODES = ("cancel", "noise")


def _default_theta():
    return {role: 0.1 for role in LINK_ROLES}


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of every squared channel gain in the network.

    Parameters
    ----------
    g_n, g_f, g_b : float
        BS -> U_n, BS -> U_f and BS -> BN power gains.
    h_n, h_f : float
        BN -> U_n and BN -> U_f power gains.
    ed_links : tuple of (float, float)
        ``(g_k, h_k)`` per eavesdropper: BS -> E_k and BN -> E_k gains.
    """

    g_n: float
    g_f: float
    g_b: float
    h_n: float
    h_f: float
    ed_links: tuple

    def __post_init__(self):
        for name in ("g_n", "g_f", "g_b", "h_n", "h_f"):
            object.__setattr__(self, name, check_nonnegative(name, getattr(self, name)))
        links = tuple(
            (check_nonnegative("g_k", g), check_nonnegative("h_k", h))
            for g, h in self.ed_links
        )
        if not links:
            raise DomainError("at least one eavesdropper link is required")
        object.__setattr__(self, "ed_links", links)

    @property
    def k_eds(self):
        return len(self.ed_links)

    def truncate(self, k_eds):
        """Keep only the first ``k_eds`` eavesdroppers."""
        k_eds = check_positive_int("k_eds", k_eds)
        if k_eds > self.k_eds:
            raise DomainError(f"cannot keep {k_eds} of {self.k_eds} eavesdroppers")
        return replace(self, ed_links=self.ed_links[:k_eds])

    def to_row(self):
        row = [self.g_n, self.g_f, self.g_b, self.h_n, self.h_f]
        for g_k, h_k in self.ed_links:
            row.extend((g_k, h_k))
        return np.asarray(row, dtype=np.float64)

    @classmethod
    def from_row(cls, row):
        row = [float(v) for v in row]
        if len(row) < 7 or (len(row) - 5) % 2:
            raise DomainError(f"row needs 5 + 2K entries with K >= 1, got {len(row)}")
        pairs = tuple(zip(row[5::2], row[6::2]))
        return cls(*row[:5], ed_links=pairs)


@dataclass(frozen=True)
class SystemConfig:
    """Network and solver parameters.

    ``theta`` maps each link role (``gn, gf, gb, hn, hf, gk, hk``) to the
    variance of its Rayleigh fading coefficient.  ``fixed_omega`` and
    ``oma_interference_mode`` only affect the benchmark schemes.
    """

    p: float = 10.0
    sigma2: float = 1.0
    theta: dict = field(default_factory=_default_theta)
    k_eds: int = 10
    tol: float = 1e-6
    max_iters: int = 200
    step0: float = 0.1
    fixed_omega: float = 0.25
    oma_interference_mode: str = "cancel"

    def __post_init__(self):
        check_positive("p", self.p)
        check_positive("sigma2", self.sigma2)
        check_positive_int("k_eds", self.k_eds)
        check_positive("tol", self.tol)
        check_positive_int("max_iters", self.max_iters)
        check_positive("step0", self.step0)
        check_omega(self.fixed_omega)
        if self.oma_interference_mode not in OMA_MODES:
            raise DomainError(
                f"oma_interference_mode must be one of {OMA_MODES}, "
                f"got {self.oma_interference_mode!r}"
            )
        theta = _default_theta()
        unknown = set(self.theta) - set(LINK_ROLES)
        if unknown:
            raise DomainError(f"unknown theta keys: {sorted(unknown)}")
        theta.update({k: check_positive(f"theta.{k}", v) for k, v in self.theta.items()})
        object.__setattr__(self, "theta", theta)

    def with_updates(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class ControlVariables:
    """Reflection coefficient ``alpha`` and near-user power share ``omega``."""

    alpha: float
    omega: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "omega", check_omega(self.omega))


@dataclass(frozen=True)
class RateReport:
    sinr_n_f: float
    sinr_n_n: float
    sinr_n_b: float
    sinr_f_f: float
    sinr_k_b_max: float
    rate_n_b: float
    rate_ed_best: float
    secrecy: float


def _backscatter_power(ch, cfg, cv):
    # alpha * |G_b|^2 * (p*omega + p*(1 - omega)) with the power sum folded to p
    return cv.alpha * ch.g_b * cfg.p


def sinr_near_decodes_far(ch, cfg, cv):
    """SINR at the near user when decoding the far user's message first."""
    signal = ch.g_n * cfg.p * (1.0 - cv.omega)
    interference = ch.g_n * cfg.p * cv.omega + ch.h_n * _backscatter_power(ch, cfg, cv)
    return signal / (interference + cfg.sigma2)


def sinr_near_own(ch, cfg, cv):
    """SINR at the near user for its own message, after SIC of the far message."""
    signal = ch.g_n * cfg.p * cv.omega
    return signal / (ch.h_n * _backscatter_power(ch, cfg, cv) + cfg.sigma2)


def sinr_near_backscatter(ch, cfg, cv):
    """SINR at the near user for the BN message, after both BS messages are removed."""
    return ch.h_n * _backscatter_power(ch, cfg, cv) / cfg.sigma2


def sinr_far_own(ch, cfg, cv):
    """SINR at the far user; near-user and BN signals are treated as noise."""
    signal = ch.g_f * cfg.p * (1.0 - cv.omega)
    interference = ch.g_f * cfg.p * cv.omega + ch.h_f * _backscatter_power(ch, cfg, cv)
    return signal / (interference + cfg.sigma2)


def sinr_ed_backscatter(ed_index, ch, cfg, cv):
    """SINR at eavesdropper ``ed_index`` for the BN message.

    The eavesdropper sees the full BS transmission as interference.
    """
    if isinstance(ed_index, bool) or not 0 <= int(ed_index) < ch.k_eds:
        raise DomainError(f"ed_index {ed_index!r} out of range for {ch.k_eds} eavesdroppers")
    g_k, h_k = ch.ed_links[int(ed_index)]
    return h_k * _backscatter_power(ch, cfg, cv) / (g_k * cfg.p + cfg.sigma2)


def _strongest_ed_sinr(ch, cfg, cv):
    return max(sinr_ed_backscatter(k, ch, cfg, cv) for k in range(ch.k_eds))


def secrecy_rate(ch, cfg, cv):
    """Secrecy rate of the backscatter message against the strongest eavesdropper, bits/s/Hz."""
    legit = math.log2(1.0 + sinr_near_backscatter(ch, cfg, cv))
    leak = math.log2(1.0 + _strongest_ed_sinr(ch, cfg, cv))
    return max(0.0, legit - leak)


def rate_report(ch, cfg, cv):
    sinr_n_b = sinr_near_backscatter(ch, cfg, cv)
    sinr_k_b = _strongest_ed_sinr(ch, cfg, cv)
    return RateReport(
        sinr_n_f=sinr_near_decodes_far(ch, cfg, cv),
        sinr_n_n=sinr_near_own(ch, cfg, cv),
        sinr_n_b=sinr_n_b,
        sinr_f_f=sinr_far_own(ch, cfg, cv),
        sinr_k_b_max=sinr_k_b,
        rate_n_b=math.log2(1.0 + sinr_n_b),
        rate_ed_best=math.log2(1.0 + sinr_k_b),
        secrecy=secrecy_rate(ch, cfg, cv),
    )


def backscatter_gains(ch, cfg):
    """Per-unit-alpha SINR slopes of the legitimate and strongest eavesdropper links.

    Returns ``(a, b, k)`` where the legitimate backscatter SINR is ``a * alpha``,
    the strongest eavesdropper's is ``b * alpha`` and ``k`` indexes that
    eavesdropper (first index wins ties).
    """
    a = ch.h_n * ch.g_b * cfg.p / cfg.sigma2
    slopes = [h_k * ch.g_b * cfg.p / (g_k * cfg.p + cfg.sigma2) for g_k, h_k in ch.ed_links]
    k = int(np.argmax(slopes))
    return a, slopes[k], k


def secrecy_objective(alpha, a, b):
    """Unclamped secrecy objective ``log2(1 + a*alpha) - log2(1 + b*alpha)``."""
    return math.log2(1.0 + a * alpha) - math.log2(1.0 + b * alpha)


def secrecy_slope(alpha, a, b):
    """Analytic derivative of :func:`secrecy_objective` with respect to ``alpha``."""
    return (a - b) / ((1.0 + a * alpha) * (1.0 + b * alpha) * math.log(2.0))
