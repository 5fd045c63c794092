"""Seeded Rayleigh-fading trials and aggregation for power and eavesdropper sweeps.

Every trial owns an independent Philox stream keyed by ``(master_seed,
trial_index)``.  Gains are drawn in a fixed role order (the five fixed links,
then one ``(g_k, h_k)`` pair per eavesdropper), so a realization with fewer
eavesdroppers is always a prefix of one with more, and adding sweep points
or trials never changes the draws of existing ones.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import DomainError, check_positive, check_positive_int
from .baselines import ALL_SCHEMES, SchemeKind, run_scheme
from .model import ChannelRealization
from .solver import solve_dual

SWEEP_KINDS = ("none", "bs_power", "ed_count")

RECORD_COLUMNS = (
    "trial", "scheme", "sweep_value", "alpha", "omega", "secrecy", "iterations", "converged",
)
AGGREGATE_COLUMNS = (
    "scheme", "sweep_value", "mean_secrecy", "stderr", "mean_iterations", "n_nonconverged",
)
TRACE_COLUMNS = ("iter", "objective", "zeta", "lambda", "alpha", "omega")


def trial_generator(master_seed, trial_index):
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.Philox(seq))


def exponential_gains(theta, size, rng):
    """Squared magnitudes of ``CN(0, theta)`` coefficients, i.e. ``Exp(mean=theta)``."""
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(~(theta > 0)):
        raise DomainError(f"channel variances must be > 0, got {theta!r}")
    return rng.standard_exponential(size) * theta


def sample_channels(cfg, trial_index, master_seed):
    """Draw the channel realization of one trial with ``cfg.k_eds`` eavesdroppers."""
    th = cfg.theta
    thetas = [th["gn"], th["gf"], th["gb"], th["hn"], th["hf"]] + [th["gk"], th["hk"]] * cfg.k_eds
    gains = exponential_gains(thetas, len(thetas), trial_generator(master_seed, trial_index))
    return ChannelRealization.from_row(gains)


@dataclass(frozen=True)
class TrialPlan:
    n_trials: int = 10000
    master_seed: int = 0
    sweep: str = "none"
    values: tuple = ()
    schemes: tuple = ALL_SCHEMES

    def __post_init__(self):
        check_positive_int("n_trials", self.n_trials)
        if not 0 <= int(self.master_seed) < 2**64:
            raise DomainError("master_seed must fit in an unsigned 64-bit integer")
        if self.sweep not in SWEEP_KINDS:
            raise DomainError(f"sweep must be one of {SWEEP_KINDS}, got {self.sweep!r}")
        values = tuple(self.values)
        if self.sweep == "none":
            if values:
                raise DomainError("sweep='none' takes no values")
        else:
            if not values:
                raise DomainError("sweep grid is empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise DomainError("sweep values must be strictly increasing")
            if self.sweep == "ed_count":
                values = tuple(check_positive_int("ed_count", v) for v in values)
            else:
                values = tuple(check_positive("bs_power", v) for v in values)
        object.__setattr__(self, "values", values)
        schemes = tuple(SchemeKind.parse(s) for s in self.schemes)
        if not schemes:
            raise DomainError("scheme set is empty")
        object.__setattr__(self, "schemes", schemes)

    def points(self, cfg):
        """``(sweep_value, config)`` pairs; ``sweep_value`` is None without a sweep."""
        if self.sweep == "none":
            return [(None, cfg)]
        if self.sweep == "bs_power":
            return [(v, cfg.with_updates(p=float(v))) for v in self.values]
        return [(v, cfg.with_updates(k_eds=v)) for v in self.values]


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    scheme: str
    sweep_value: object
    alpha: float
    omega: float
    secrecy: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class TrialAggregate:
    scheme: str
    sweep_value: object
    mean_secrecy: float
    stderr: float
    mean_iterations: float
    n_effective: int
    n_nonconverged: int
    n_errors: int = field(default=0)


def summarize(records, n_errors=0):
    """Mean, standard error and iteration statistics of one (scheme, sweep point) cell.

    Sums are exactly rounded (``math.fsum``), so the result does not depend
    on record order.
    """
    records = list(records)
    if not records:
        raise DomainError("cannot summarize an empty record list")
    n = len(records)
    values = [r.secrecy for r in records]
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
        stderr = math.sqrt(var / n)
    else:
        stderr = 0.0
    return TrialAggregate(
        scheme=records[0].scheme,
        sweep_value=records[0].sweep_value,
        mean_secrecy=mean,
        stderr=stderr,
        mean_iterations=math.fsum(r.iterations for r in records) / n,
        n_effective=n,
        n_nonconverged=sum(not r.converged for r in records),
        n_errors=n_errors,
    )


def run_plan(plan, cfg, records=None):
    """Run every scheme at every sweep point on matched channel draws.

    Parameters
    ----------
    plan : TrialPlan
    cfg : SystemConfig
        Base configuration; the swept field is overridden per point.
    records : list, optional
        If given, per-trial :class:`TrialRecord` objects are appended to it.

    Returns
    -------
    list of TrialAggregate
        Ordered by sweep point, then by ``plan.schemes``.
    """
    points = plan.points(cfg)
    k_max = max(c.k_eds for _, c in points)
    base = cfg.with_updates(k_eds=k_max)
    channels = [sample_channels(base, t, plan.master_seed) for t in range(plan.n_trials)]

    aggregates = []
    for value, point_cfg in points:
        cell = {kind: [] for kind in plan.schemes}
        errors = dict.fromkeys(plan.schemes, 0)
        for t, full in enumerate(channels):
            ch = full.truncate(point_cfg.k_eds) if full.k_eds != point_cfg.k_eds else full
            for kind in plan.schemes:
                try:
                    res = run_scheme(kind, ch, point_cfg)
                except (DomainError, ArithmeticError):
                    errors[kind] += 1
                    continue
                cell[kind].append(
                    TrialRecord(
                        trial=t,
                        scheme=kind.value,
                        sweep_value=value,
                        alpha=res.controls.alpha,
                        omega=res.controls.omega,
                        secrecy=res.secrecy,
                        iterations=res.iterations,
                        converged=res.converged,
                    )
                )
        for kind in plan.schemes:
            if records is not None:
                records.extend(cell[kind])
            if cell[kind]:
                aggregates.append(summarize(cell[kind], n_errors=errors[kind]))
    return aggregates


def convergence_trace(cfg, seed, n_instances=1):
    """Per-iteration ``(objective, zeta, lambda, alpha, omega)`` path of the dual solver.

    With ``n_instances > 1`` the paths of trials ``0 .. n_instances-1`` are
    averaged; a path that converged early holds its final row.
    """
    n_instances = check_positive_int("n_instances", n_instances)
    traces = [solve_dual(sample_channels(cfg, t, seed), cfg).trace for t in range(n_instances)]
    length = max(len(tr) for tr in traces)
    rows = []
    for i in range(length):
        at = [tr[min(i, len(tr) - 1)] for tr in traces]
        rows.append(
            {
                "iter": i + 1,
                "objective": math.fsum(r.objective for r in at) / n_instances,
                "zeta": math.fsum(r.zeta for r in at) / n_instances,
                "lambda": math.fsum(r.lam for r in at) / n_instances,
                "alpha": math.fsum(r.alpha for r in at) / n_instances,
                "omega": math.fsum(r.omega for r in at) / n_instances,
            }
        )
    return rows


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def write_records_csv(path, records):
    _write_csv(path, RECORD_COLUMNS, (vars(r) for r in records))


def write_aggregates_csv(path, aggregates):
    _write_csv(path, AGGREGATE_COLUMNS, (vars(a) for a in aggregates))


def write_trace_csv(path, rows):
    _write_csv(path, TRACE_COLUMNS, rows)
