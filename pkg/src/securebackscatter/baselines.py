"""Benchmark schemes: fixed-split NOMA and two-slot TDMA (OMA) backscatter."""

import enum
import math

from ._validation import DomainError, check_alpha, check_omega
from .model import ControlVariables, backscatter_gains
from .solver import SolveResult, _dual_loop, endpoint_value, solve_dual


class SchemeKind(enum.Enum):
    NOMA_OPTIMAL = "noma_optimal"
    NOMA_SUBOPTIMAL = "noma_suboptimal"
    OMA_OPTIMAL = "oma_optimal"

    @classmethod
    def parse(cls, value):
        """Accept enum members, canonical values or the CLI spellings."""
        if isinstance(value, cls):
            return value
        aliases = {"noma-opt": "noma_optimal", "noma-subopt": "noma_suboptimal", "oma": "oma_optimal"}
        try:
            return cls(aliases.get(value, value))
        except ValueError:
            raise DomainError(f"unknown scheme {value!r}") from None


ALL_SCHEMES = tuple(SchemeKind)


def solve_suboptimal_noma(ch, cfg, fixed_omega=None):
    """Optimize the reflection coefficient with the BS power split held fixed.

    ``fixed_omega`` defaults to ``cfg.fixed_omega``.  The power-ordering
    multiplier is frozen, so only the reflection branch of the dual method runs.
    """
    omega = check_omega(cfg.fixed_omega if fixed_omega is None else fixed_omega)
    return _dual_loop(ch, cfg, fixed_omega=omega)


def _oma_legit_slope(ch, cfg):
    if cfg.oma_interference_mode == "cancel":
        return ch.h_n * ch.g_b * cfg.p / cfg.sigma2
    # U_n treats the far user's slot-2 direct signal as noise
    return ch.h_n * ch.g_b * cfg.p / (ch.g_n * cfg.p + cfg.sigma2)


def oma_secrecy_rate(ch, cfg, alpha):
    """Time-averaged OMA secrecy rate for a given reflection coefficient.

    Slot 1 serves U_n with no backscatter; slot 2 serves U_f at full power
    while the BN reflects toward U_n.  Only slot 2 carries the BN message.
    """
    alpha = check_alpha(alpha)
    a = _oma_legit_slope(ch, cfg)
    _, b, _ = backscatter_gains(ch, cfg)
    return 0.5 * max(0.0, math.log2(1.0 + a * alpha) - math.log2(1.0 + b * alpha))


def solve_oma(ch, cfg):
    """Optimal OMA secrecy: equal two-slot TDMA with the endpoint reflection rule."""
    a = _oma_legit_slope(ch, cfg)
    _, b, _ = backscatter_gains(ch, cfg)
    alpha, value = endpoint_value(a, b)
    return SolveResult(
        controls=ControlVariables(alpha, 0.5),
        secrecy=0.5 * value,
        iterations=0,
        converged=True,
    )


def run_scheme(kind, ch, cfg):
    kind = SchemeKind.parse(kind)
    if kind is SchemeKind.NOMA_OPTIMAL:
        return solve_dual(ch, cfg)
    if kind is SchemeKind.NOMA_SUBOPTIMAL:
        return solve_suboptimal_noma(ch, cfg)
    return solve_oma(ch, cfg)
