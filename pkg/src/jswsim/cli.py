"""Command line front end.

Subcommands:

    simulate       run forward trajectories, optionally dumping a CSV
    loynes         backward stationary-profile estimation per seed
    compare        coupled-path dominance checks (server counts or ranks)
    verify-properties  randomized checks of the ordering closure properties

Exit codes: 0 success, 1 violation or counterexample found, 2 bad
configuration, 3 bad input data, 4 the offered load is not subcritical,
5 the backward iteration hit max_n without converging (the estimate is
still printed), 6 a comparison premise does not hold.

Output files contain no timestamps, so a rerun with the same
configuration is byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import __version__
from .comparison import (
    ComparisonReport,
    SystemConfig,
    compare_allocation_ranks,
    compare_server_counts,
    run_trajectory,
    write_trajectory_csv,
    write_violations_csv,
)
from .config import CONFIG_ENV_VAR, CONFIG_HELP, ExperimentConfig, load_config
from .errors import ConfigError, InputError, PremiseError, StabilityError
from .loynes import LoynesResult, estimate_stationary
from .orderings import run_property_suite
from .processes import RNG_ALGORITHM, generate, model_label
from .profiles import pth_step, total_workload

__all__ = ["main"]

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_UNSTABLE = 4
EXIT_NO_CONVERGENCE = 5
EXIT_PREMISE = 6


def _pool_map(fn, payloads, jobs):
    if jobs <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    # executor.map keeps submission order, so parallel output is
    # identical to the sequential one.
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, payloads))


def _fmt(x: float) -> str:
    return repr(float(x))


def _open_out(path: str):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot write output file {path!r}: {exc}") from exc


# ---------------------------------------------------------------- simulate


def _sim_one(payload):
    model, seed, horizon, system = payload
    marks = generate(model, seed, horizon)
    profile = system.start_profile()
    rows = [(seed, 0, profile, total_workload(profile), None)]
    wait_sum = 0.0
    for mark in marks:
        wait = profile[system.rank - 1]
        wait_sum += wait
        profile = pth_step(profile, mark, system.rank)
        rows.append((seed, len(rows), profile, total_workload(profile), wait))
    return seed, rows, wait_sum / horizon


def cmd_simulate(cfg: ExperimentConfig) -> int:
    system = cfg.system
    payloads = [(cfg.model, s, cfg.horizon, system) for s in cfg.seeds]
    results = _pool_map(_sim_one, payloads, cfg.jobs)
    if cfg.out is not None:
        with _open_out(cfg.out) as f:
            f.write("# jswsim simulate\n")
            f.write(f"# model: {model_label(cfg.model)}\n")
            f.write(f"# rng: {RNG_ALGORITHM}\n")
            f.write(f"# servers: {system.servers} rank: {system.rank}\n")
            f.write(f"# seeds: {' '.join(str(s) for s in cfg.seeds)}\n")
            writer = csv.writer(f, lineterminator="\n")
            coord_names = [f"w{i + 1}" for i in range(system.servers)]
            writer.writerow(["seed", "step", *coord_names, "total", "wait"])
            for _, rows, _ in results:
                for seed, step, profile, total, wait in rows:
                    writer.writerow(
                        [seed, step]
                        + [_fmt(x) for x in profile]
                        + [_fmt(total), "" if wait is None else _fmt(wait)]
                    )
    for seed, rows, mean_wait in results:
        final = rows[-1][2]
        print(
            f"seed {seed}: {cfg.horizon} arrivals, mean offered wait {mean_wait:.6g}, "
            f"final total workload {total_workload(final):.6g}"
        )
    if cfg.out is not None:
        print(f"wrote {cfg.out}")
    return EXIT_OK


# ------------------------------------------------------------------ loynes


def _loynes_one(payload):
    model, seed, settings, keep_history = payload
    return seed, estimate_stationary(
        model,
        seed,
        settings.servers,
        rank=settings.rank,
        tolerance=settings.tolerance,
        window=settings.window,
        max_n=settings.max_n,
        keep_history=keep_history,
    )


def cmd_loynes(cfg: ExperimentConfig) -> int:
    settings = cfg.loynes
    keep = settings.snapshots is not None
    payloads = [(cfg.model, s, settings, keep) for s in cfg.seeds]
    results: list[tuple[int, LoynesResult]] = _pool_map(_loynes_one, payloads, cfg.jobs)
    all_converged = True
    for seed, res in results:
        state = "converged" if res.converged else "NOT CONVERGED"
        all_converged &= res.converged
        inc = "inf" if math.isinf(res.last_increment) else f"{res.last_increment:.3g}"
        prof = "(" + ", ".join(f"{x:.6g}" for x in res.profile) + ")"
        print(f"seed {seed}: n={res.steps_used} {state} increment={inc} profile={prof}")
    waits = [res.profile[0] for _, res in results]
    print(f"mean offered wait over {len(waits)} seeds: {math.fsum(waits) / len(waits):.6g}")
    if settings.snapshots is not None:
        with _open_out(settings.snapshots) as f:
            f.write("# jswsim loynes snapshots\n")
            f.write(f"# model: {model_label(cfg.model)}\n")
            f.write(f"# rng: {RNG_ALGORITHM}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["seed", "n", "coordinate", "value"])
            for seed, res in results:
                for n, profile in res.history or ():
                    for j, value in enumerate(profile, start=1):
                        writer.writerow([seed, n, j, _fmt(value)])
        print(f"wrote {settings.snapshots}")
    if not all_converged:
        print(
            f"tolerance {settings.tolerance:g} not reached by n={settings.max_n}; "
            "estimates above are the last iterates",
            file=sys.stderr,
        )
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


# ----------------------------------------------------------------- compare


def _compare_one(payload):
    model, seed, horizon, settings = payload
    marks = generate(model, seed, horizon)
    if settings.mode == "servers":
        report = compare_server_counts(
            settings.servers,
            settings.servers_small,
            marks,
            sum_slack=settings.sum_slack,
            corrupt_step=settings.corrupt_step,
        )
    else:
        servers = settings.servers
        start = settings.start if settings.start is not None else (0.0,) * servers
        start_alt = settings.start_alt if settings.start_alt is not None else (0.0,) * servers
        report = compare_allocation_ranks(
            servers,
            settings.rank,
            start,
            start_alt,
            marks,
            tol=settings.tolerance,
        )
    return seed, report


def _dump_compare_trajectories(cfg: ExperimentConfig, path: str) -> None:
    settings = cfg.compare
    if settings.mode == "servers":
        configs = [
            SystemConfig(settings.servers, 1),
            SystemConfig(settings.servers_small, 1),
        ]
    else:
        servers = settings.servers
        start = settings.start if settings.start is not None else (0.0,) * servers
        start_alt = settings.start_alt if settings.start_alt is not None else (0.0,) * servers
        configs = [
            SystemConfig(servers, 1, start),
            SystemConfig(servers, settings.rank, start_alt),
        ]
    trajectories = []
    for seed in cfg.seeds:
        marks = generate(cfg.model, seed, cfg.horizon)
        trajectories.extend(run_trajectory(c, marks) for c in configs)
    rows = write_trajectory_csv(path, trajectories)
    print(f"wrote {path} ({rows} rows)")


def cmd_compare(cfg: ExperimentConfig) -> int:
    settings = cfg.compare
    payloads = [(cfg.model, s, cfg.horizon, settings) for s in cfg.seeds]
    results: list[tuple[int, ComparisonReport]] = _pool_map(_compare_one, payloads, cfg.jobs)
    total_violations = 0
    labeled = []
    for seed, report in results:
        total_violations += len(report.violations)
        label_a, label_b = report.systems
        waits = report.mean_offered_wait
        print(
            f"seed {seed}: {report.steps_checked} steps, {len(report.violations)} violations, "
            f"mean offered wait {label_a}={waits[0]:.6g} {label_b}={waits[1]:.6g}"
        )
        context = f"seed{seed}:{label_a}-vs-{label_b}"
        for v in report.violations[:5]:
            print(f"  step {v.step} {v.inequality}: {v.lhs!r} vs {v.rhs!r}")
        if len(report.violations) > 5:
            print(f"  ... {len(report.violations) - 5} more")
        labeled.extend((context, v) for v in report.violations)
    if cfg.out is not None:
        write_violations_csv(cfg.out, labeled)
        print(f"wrote {cfg.out} ({len(labeled)} violations)")
    if settings.trajectories is not None:
        _dump_compare_trajectories(cfg, settings.trajectories)
    if total_violations:
        print(f"FAIL: {total_violations} dominance violations")
        return EXIT_VIOLATION
    print("PASS: dominance held at every step of every run")
    return EXIT_OK


# ----------------------------------------------------------- verify-properties


def cmd_verify_properties(cfg: ExperimentConfig) -> int:
    settings = cfg.properties
    failed = 0
    for name in settings.suites:
        report = run_property_suite(
            name,
            settings.instances,
            max_dim=settings.max_dim,
            seed=settings.seed,
            tol=settings.tolerance,
        )
        state = "PASS" if report.passed else "FAIL"
        print(f"suite {name}: {report.instances} instances, {report.failures} failures {state}")
        for descr in report.counterexamples:
            print(f"  counterexample: {descr}")
        failed += not report.passed
    if failed:
        print(f"FAIL: {failed} suite(s) produced counterexamples")
        return EXIT_VIOLATION
    print("PASS: all suites clean")
    return EXIT_OK


# -------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jswsim",
        description="simulate and verify parallel queues under "
        "least-workload allocation",
        epilog=CONFIG_HELP
        + f"\nthe environment variable {CONFIG_ENV_VAR} names a default config file\n",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, horizon=True, out_help="CSV output path"):
        p.add_argument("--config", help=f"config file (default: ${CONFIG_ENV_VAR})")
        p.add_argument("--seed", type=int, help="run a single seed")
        p.add_argument("--seeds", help="seed list, e.g. '1 2 10..20'")
        p.add_argument("--jobs", type=int, help="worker processes across seeds")
        if horizon:
            p.add_argument("--horizon", type=int, help="customers per run")
        p.add_argument("--out", help=out_help)

    p_sim = sub.add_parser("simulate", help="forward trajectories")
    common(p_sim, out_help="wide trajectory CSV (seed,step,w1..wS,total,wait)")
    p_sim.set_defaults(func=cmd_simulate)

    p_loy = sub.add_parser("loynes", help="backward stationary estimates")
    common(p_loy, horizon=False, out_help="per-doubling snapshot CSV")
    p_loy.set_defaults(func=cmd_loynes)

    p_cmp = sub.add_parser("compare", help="coupled dominance checks")
    common(p_cmp, out_help="violations CSV")
    p_cmp.set_defaults(func=cmd_compare)

    p_lem = sub.add_parser("verify-properties", help="ordering closure checks")
    p_lem.add_argument("--config", help=f"config file (default: ${CONFIG_ENV_VAR})")
    p_lem.add_argument("--seed", type=int, help="sampler seed")
    p_lem.add_argument("--instances", type=int, help="instances per suite")
    p_lem.set_defaults(func=cmd_verify_properties)

    return parser


def _configure(args: argparse.Namespace) -> ExperimentConfig:
    # verify-properties has its own --seed (the sampler seed), handled below.
    seeds = getattr(args, "seeds", None)
    if args.func is not cmd_verify_properties and getattr(args, "seed", None) is not None:
        if seeds is not None:
            raise ConfigError("--seed and --seeds are mutually exclusive")
        seeds = str(args.seed)
    cfg = load_config(
        args.config,
        seeds=seeds,
        horizon=getattr(args, "horizon", None),
        jobs=getattr(args, "jobs", None),
        out=getattr(args, "out", None),
    )
    if args.func is cmd_verify_properties:
        props = cfg.properties
        if args.seed is not None:
            props = replace(props, seed=args.seed)
        if args.instances is not None:
            props = replace(props, instances=args.instances)
        cfg = replace(cfg, properties=props)
    if args.func is cmd_loynes and getattr(args, "out", None) is not None:
        cfg = replace(cfg, loynes=replace(cfg.loynes, snapshots=args.out))
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _configure(args)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except PremiseError as exc:
        print(f"premise not satisfied: {exc}", file=sys.stderr)
        return EXIT_PREMISE


if __name__ == "__main__":
    sys.exit(main())
