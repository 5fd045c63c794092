"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 oracle-check violation,
4 I/O error.
"""

import argparse
import json
import logging
import os
import sys

from ._validation import DomainError
from .baselines import ALL_SCHEMES, SchemeKind, run_scheme
from .model import LINK_ROLES, ControlVariables, SystemConfig, secrecy_rate
from .montecarlo import (
    TrialPlan,
    convergence_trace,
    run_plan,
    sample_channels,
    write_aggregates_csv,
    write_records_csv,
    write_trace_csv,
)
from .solver import endpoint_oracle, grid_oracle, lattice_cell_variation, solve_dual

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_ORACLE, EXIT_IO = 0, 2, 3, 4

CONFIG_KEYS = {
    "p", "sigma2", "theta", "k_eds", "tol", "max_iters", "step0",
    "n_trials", "master_seed", "fixed_omega", "oma_interference_mode",
}
SYSTEM_KEYS = CONFIG_KEYS - {"n_trials", "master_seed"}

FLAG_TO_KEY = {
    "seed": "master_seed",
    "trials": "n_trials",
    "p": "p",
    "k_eds": "k_eds",
    "tol": "tol",
    "max_iters": "max_iters",
    "step0": "step0",
    "fixed_omega": "fixed_omega",
}

DUAL_GRID_TOL = 1e-3
ENDPOINT_SLACK = 1e-9


class ConfigError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--seed", type=int, metavar="U64", help="master seed")
    common.add_argument("--trials", type=int, metavar="N", help="Monte Carlo trials / instances")
    common.add_argument("--p", type=float, metavar="WATTS", help="BS power budget")
    common.add_argument("--k-eds", type=int, metavar="N", help="number of eavesdroppers")
    common.add_argument(
        "--scheme",
        action="append",
        choices=["noma-opt", "noma-subopt", "oma"],
        help="scheme to run; repeat to select several (default: all)",
    )
    common.add_argument("--tol", type=float, metavar="F")
    common.add_argument("--max-iters", type=int, metavar="N")
    common.add_argument("--step0", type=float, metavar="F")
    common.add_argument("--fixed-omega", type=float, metavar="F")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="securebackscatter",
        description="Secrecy-rate optimization for NOMA ambient backscatter networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("solve", parents=[common], help="solve one seeded instance")

    sp = sub.add_parser("sweep-power", parents=[common], help="mean secrecy versus BS power")
    sp.add_argument("--powers", type=_float_list, help="power grid in watts (default 1..15)")
    sp.add_argument("--records", action="store_true", help="also write per-trial records")

    se = sub.add_parser("sweep-eds", parents=[common], help="mean secrecy versus eavesdropper count")
    se.add_argument("--eds", type=_int_list, help="eavesdropper counts (default 1..10)")
    se.add_argument("--records", action="store_true", help="also write per-trial records")

    tr = sub.add_parser("trace", parents=[common], help="per-iteration solver traces")
    tr.add_argument("--powers", type=_float_list, help="power values (default 7,10,15)")
    tr.add_argument("--instances", type=int, default=1, help="instances averaged per trace")

    oc = sub.add_parser("oracle-check", parents=[common], help="cross-check solver against oracles")
    oc.add_argument("--grid", type=int, default=201, help="lattice points per axis")
    oc.add_argument("--inject-alpha-error", type=int, metavar="TRIAL", help=argparse.SUPPRESS)
    return parser


def load_settings(args):
    """Merge the config file with flag overrides (flags win)."""
    settings = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        for key in doc:
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
        if "theta" in doc:
            if not isinstance(doc["theta"], dict):
                raise ConfigError("config key 'theta' must be an object")
            for role in doc["theta"]:
                if role not in LINK_ROLES:
                    raise ConfigError(f"unknown config key 'theta.{role}'")
        settings.update(doc)
    for flag, key in FLAG_TO_KEY.items():
        value = getattr(args, flag)
        if value is not None:
            settings[key] = value
    seed = settings.get("master_seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {seed!r}")
    return settings


def make_config(settings, **defaults):
    merged = {**defaults, **{k: v for k, v in settings.items() if k in SYSTEM_KEYS}}
    try:
        return SystemConfig(**merged)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def _schemes(args):
    if not args.scheme:
        return ALL_SCHEMES
    return tuple(dict.fromkeys(SchemeKind.parse(s) for s in args.scheme))


def _plan(settings, args, sweep, values):
    try:
        return TrialPlan(
            n_trials=settings.get("n_trials", 10000),
            master_seed=settings.get("master_seed", 0),
            sweep=sweep,
            values=tuple(values),
            schemes=_schemes(args),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _write_json(path, payload):
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_solve(args, settings):
    cfg = make_config(settings, k_eds=5)
    seed = settings.get("master_seed", 0)
    kind = _schemes(args)[0] if args.scheme else SchemeKind.NOMA_OPTIMAL
    ch = sample_channels(cfg, 0, seed)
    res = run_scheme(kind, ch, cfg)
    payload = {"scheme": kind.value, "seed": seed, "channels": ch.to_row().tolist(), **res.to_dict()}
    _write_json(os.path.join(args.out, "solve.json"), payload)
    print(
        f"alpha={res.controls.alpha!r} omega={res.controls.omega!r} "
        f"secrecy={res.secrecy!r} converged={str(res.converged).lower()}"
    )
    return EXIT_OK


def _sweep(args, settings, sweep, values, cfg, stem):
    plan = _plan(settings, args, sweep, values)
    records = [] if args.records else None
    aggregates = run_plan(plan, cfg, records=records)
    path = os.path.join(args.out, f"{stem}.csv")
    write_aggregates_csv(path, aggregates)
    if records is not None:
        write_records_csv(os.path.join(args.out, f"{stem}_trials.csv"), records)
    for agg in aggregates:
        log.info("%s @ %s: %.6g +/- %.2g", agg.scheme, agg.sweep_value, agg.mean_secrecy, agg.stderr)
    print(path)
    return EXIT_OK


def cmd_sweep_power(args, settings):
    cfg = make_config(settings, k_eds=5)
    powers = args.powers if args.powers is not None else [float(v) for v in range(1, 16)]
    return _sweep(args, settings, "bs_power", powers, cfg, "sweep_power")


def cmd_sweep_eds(args, settings):
    cfg = make_config(settings, p=10.0)
    eds = args.eds if args.eds is not None else list(range(1, 11))
    return _sweep(args, settings, "ed_count", eds, cfg, "sweep_eds")


def cmd_trace(args, settings):
    base = make_config(settings, k_eds=5)
    powers = args.powers if args.powers is not None else [7.0, 10.0, 15.0]
    if not powers:
        raise ConfigError("power list is empty")
    if args.instances < 1:
        raise ConfigError("--instances must be >= 1")
    seed = settings.get("master_seed", 0)
    for p in powers:
        cfg = base.with_updates(p=p)
        rows = convergence_trace(cfg, seed, n_instances=args.instances)
        path = os.path.join(args.out, f"trace_p{p:g}.csv")
        write_trace_csv(path, rows)
        print(f"{path} final_objective={rows[-1]['objective']!r}")
    return EXIT_OK


def cmd_oracle_check(args, settings):
    cfg = make_config(settings, k_eds=5)
    n = settings.get("n_trials", 100)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"--trials must be a positive integer, got {n!r}")
    seed = settings.get("master_seed", 0)
    worst = 0.0
    violations = []
    rows = []
    for t in range(n):
        ch = sample_channels(cfg, t, seed)
        dual = solve_dual(ch, cfg)
        dual_secrecy = dual.secrecy
        if args.inject_alpha_error == t:
            # test hook: pretend the solver returned the opposite endpoint
            bad = ControlVariables(1.0 - round(dual.controls.alpha), dual.controls.omega)
            dual_secrecy = secrecy_rate(ch, cfg, bad)
        grid = grid_oracle(ch, cfg, args.grid, args.grid)
        end = endpoint_oracle(ch, cfg)
        cell = lattice_cell_variation(ch, cfg, args.grid)
        dev = abs(dual_secrecy - grid.secrecy)
        worst = max(worst, dev)
        ok = (
            dev <= DUAL_GRID_TOL
            and abs(grid.secrecy - end.secrecy) <= cell + 1e-12
            and dual_secrecy <= end.secrecy + ENDPOINT_SLACK
        )
        rows.append(
            {"trial": t, "dual": dual_secrecy, "grid": grid.secrecy, "endpoint": end.secrecy, "ok": ok}
        )
        if not ok:
            violations.append(t)
            print(f"violation: seed={seed} trial={t} dual={dual_secrecy!r} grid={grid.secrecy!r} "
                  f"endpoint={end.secrecy!r}", file=sys.stderr)
    _write_json(os.path.join(args.out, "oracle_check.json"),
                {"seed": seed, "max_deviation": worst, "instances": rows})
    print(f"instances={n} max_deviation={worst!r} violations={len(violations)}")
    return EXIT_ORACLE if violations else EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "sweep-power": cmd_sweep_power,
    "sweep-eds": cmd_sweep_eds,
    "trace": cmd_trace,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = load_settings(args)
        os.makedirs(args.out, exist_ok=True)
        return COMMANDS[args.command](args, settings)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
