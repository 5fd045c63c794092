"""Secrecy-rate maximization for NOMA networks with an ambient backscatter node."""

from ._validation import DomainError
from .baselines import SchemeKind, run_scheme, solve_oma, solve_suboptimal_noma
from .estimator import SecrecyRateOptimizer
from .model import (
    ChannelRealization,
    ControlVariables,
    RateReport,
    SystemConfig,
    rate_report,
    secrecy_rate,
)
from .montecarlo import TrialAggregate, TrialPlan, run_plan, sample_channels, summarize
from .solver import DualState, SolveResult, endpoint_oracle, grid_oracle, solve_dual

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization",
    "ControlVariables",
    "DomainError",
    "DualState",
    "RateReport",
    "SchemeKind",
    "SecrecyRateOptimizer",
    "SolveResult",
    "SystemConfig",
    "TrialAggregate",
    "TrialPlan",
    "endpoint_oracle",
    "grid_oracle",
    "rate_report",
    "run_plan",
    "run_scheme",
    "sample_channels",
    "secrecy_rate",
    "solve_dual",
    "solve_oma",
    "solve_suboptimal_noma",
    "summarize",
]
