"""Coupled-path harnesses for comparing allocation policies and server counts.

All comparisons are pathwise: the systems being compared consume exactly the
same mark sequence, so the checked inequalities are expected to hold at
every step with zero tolerance (sum comparisons carry a small documented
slack because accumulating different vectors rounds differently). An
independent event-based FCFS simulation provides an external cross-check of
the recursion, and an ECDF dominance diagnostic covers distributional,
non-pathwise claims.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import PremiseError
from .orderings import prec_p, prec_star
from .profiles import Mark, Profile, pad, pth_step, total_workload, zero_profile
from .processes import MarkSequence, model_label

__all__ = [
    "ComparisonReport",
    "EcdfDominance",
    "MarksInfo",
    "StepViolation",
    "SystemConfig",
    "Trajectory",
    "compare_allocation_ranks",
    "compare_server_counts",
    "ecdf_dominance",
    "fcfs_waiting_times",
    "iter_profiles",
    "run_trajectory",
    "write_trajectory_csv",
    "write_violations_csv",
]

DEFAULT_SUM_SLACK = 1e-12
HISTORY_CAP = 100_000


@dataclass(frozen=True)
class SystemConfig:
    """One simulated system: server count, allocation rank, starting profile."""

    servers: int
    rank: int = 1
    initial: Profile | None = None

    def __post_init__(self) -> None:
        if self.servers < 1:
            raise ValueError(f"servers must be >= 1, got {self.servers}")
        if not 1 <= self.rank <= self.servers:
            raise ValueError(f"allocation rank {self.rank} outside [1, {self.servers}]")
        if self.initial is not None:
            start = tuple(float(x) for x in self.initial)
            if len(start) != self.servers:
                raise ValueError(
                    f"initial profile has {len(start)} entries, expected {self.servers}"
                )
            if any(not math.isfinite(x) or x < 0.0 for x in start):
                raise ValueError("initial profile entries must be finite and >= 0")
            if any(a > b for a, b in zip(start, start[1:])):
                raise ValueError("initial profile must be nondecreasing")
            object.__setattr__(self, "initial", start)

    @property
    def label(self) -> str:
        return f"S{self.servers}P{self.rank}"

    def start_profile(self) -> Profile:
        return self.initial if self.initial is not None else zero_profile(self.servers)


class MarksInfo(NamedTuple):
    """Provenance of the marks a trajectory consumed."""

    seed: int
    model: str
    length: int
    algorithm: str


def _marks_info(marks: MarkSequence) -> MarksInfo:
    return MarksInfo(marks.seed, model_label(marks.model), len(marks), marks.algorithm)


@dataclass
class Trajectory:
    """Profiles seen by customers 0..n when replaying a mark sequence."""

    config: SystemConfig
    profiles: list[Profile]
    marks_info: MarksInfo


def iter_profiles(config: SystemConfig, marks: MarkSequence) -> Iterator[Profile]:
    """Yield the starting profile, then the profile after each arrival."""
    state = config.start_profile()
    yield state
    rank = config.rank
    for s_, x_ in zip(marks.sigma.tolist(), marks.xi.tolist()):
        state = pth_step(state, (s_, x_), rank)
        yield state


def run_trajectory(config: SystemConfig, marks: MarkSequence) -> Trajectory:
    """Materialized trajectory: len(marks) + 1 profiles."""
    return Trajectory(config, list(iter_profiles(config, marks)), _marks_info(marks))


class StepViolation(NamedTuple):
    """One failed inequality: identifier, step, and both sides."""

    inequality: str
    step: int
    lhs: float
    rhs: float


@dataclass
class ComparisonReport:
    """Outcome of a coupled-path comparison between two systems."""

    mode: str
    systems: tuple[str, str]
    marks_info: MarksInfo
    steps_checked: int = 0
    violations: list[StepViolation] = field(default_factory=list)
    mean_offered_wait: tuple[float, float] = (0.0, 0.0)
    final_profiles: tuple[Profile, Profile] = ((), ())
    # per-step series, kept only while the horizon fits under the history cap
    totals: tuple[list[float], list[float]] | None = None
    offered_waits: tuple[list[float], list[float]] | None = None

    @property
    def passed(self) -> bool:
        return not self.violations


def _corrupted(profile: Profile, reference_total: float) -> Profile:
    bump = 10.0 * (1.0 + abs(reference_total))
    return profile[:-1] + (profile[-1] + bump,)


def compare_server_counts(
    servers_big: int,
    servers_small: int,
    marks: MarkSequence,
    sum_slack: float = DEFAULT_SUM_SLACK,
    history_cap: int = HISTORY_CAP,
    corrupt_step: int | None = None,
) -> ComparisonReport:
    """Check that more servers never hurt, pathwise, from empty starts.

    Both systems run shortest-workload allocation on the same marks. At
    every step three families of inequalities are checked: the top
    ``servers_small`` coordinates of the big system are bounded by the small
    system's coordinates (exact), the total workload of the big system is
    bounded by the small system's (within ``sum_slack``), and the big
    profile is rank-ordered below the small profile padded with idle
    servers, for rank ``servers_big - servers_small + 1`` (tail sums within
    ``sum_slack``). At most one violation is recorded per step, the first in
    that order. ``corrupt_step`` deliberately corrupts the checked copy of
    the big profile at one step; it exists so tests can prove the harness
    reports violations.
    """
    if not 1 <= servers_small <= servers_big:
        raise ValueError(
            f"need 1 <= servers_small <= servers_big, got {servers_small}, {servers_big}"
        )
    shift = servers_big - servers_small
    big = zero_profile(servers_big)
    small = zero_profile(servers_small)
    report = ComparisonReport(
        mode="server-count",
        systems=(f"S{servers_big}", f"S{servers_small}"),
        marks_info=_marks_info(marks),
    )
    keep = len(marks) <= history_cap
    series_t: tuple[list[float], list[float]] = ([], [])
    series_w: tuple[list[float], list[float]] = ([], [])
    sum_w_big = 0.0
    sum_w_small = 0.0
    sig = marks.sigma.tolist()
    xis = marks.xi.tolist()
    for step in range(len(marks) + 1):
        checked = big
        if step == corrupt_step:
            checked = _corrupted(big, total_workload(small))
        violation: StepViolation | None = None
        for j in range(servers_small):
            if checked[shift + j] > small[j]:
                violation = StepViolation(
                    f"coordinate[{j + 1}]", step, checked[shift + j], small[j]
                )
                break
        tb = total_workload(big)
        ts = total_workload(small)
        t_checked = tb if checked is big else total_workload(checked)
        if violation is None and t_checked > ts + sum_slack:
            violation = StepViolation("total", step, t_checked, ts)
        if violation is None:
            star = prec_star(checked, pad(small, servers_big), sum_slack)
            if not star:
                v = star.first_violation
                violation = StepViolation(f"tail_sum[{v.index}]", step, v.lhs, v.rhs)
        if violation is not None:
            report.violations.append(violation)
        sum_w_big += big[0]
        sum_w_small += small[0]
        if keep:
            series_t[0].append(tb)
            series_t[1].append(ts)
            series_w[0].append(big[0])
            series_w[1].append(small[0])
        if step < len(marks):
            mark = (sig[step], xis[step])
            big = pth_step(big, mark, 1)
            small = pth_step(small, mark, 1)
    steps = len(marks) + 1
    report.steps_checked = steps
    report.mean_offered_wait = (sum_w_big / steps, sum_w_small / steps)
    report.final_profiles = (big, small)
    if keep:
        report.totals = series_t
        report.offered_waits = series_w
    return report


def compare_allocation_ranks(
    servers: int,
    rank: int,
    start: Profile,
    start_alt: Profile,
    marks: MarkSequence,
    tol: float = 0.0,
    history_cap: int = HISTORY_CAP,
    corrupt_step: int | None = None,
) -> ComparisonReport:
    """Check that shortest-workload allocation stays rank-ordered below
    rank allocation, pathwise, from rank-ordered starts.

    The premise requires ``start`` rank-ordered below ``start_alt``; it is an
    error to call with starts that violate it. Both systems consume the same
    marks: the first from ``start`` joining the least-loaded queue, the
    second from ``start_alt`` joining the rank-th least-loaded queue. The
    rank ordering is re-checked after every arrival with tolerance ``tol``
    (the two paths share one arithmetic route, so the default is exact).
    """
    start = tuple(float(x) for x in start)
    start_alt = tuple(float(x) for x in start_alt)
    if len(start) != servers or len(start_alt) != servers:
        raise ValueError("starting profiles must have one entry per server")
    premise = prec_p(start, start_alt, rank, tol)
    if not premise:
        v = premise.first_violation
        raise PremiseError(
            f"starts are not rank-ordered: {v.clause}[{v.index}] has {v.lhs!r} > {v.rhs!r}"
        )
    report = ComparisonReport(
        mode="allocation-rank",
        systems=(f"S{servers}P1", f"S{servers}P{rank}"),
        marks_info=_marks_info(marks),
    )
    keep = len(marks) <= history_cap
    series_t: tuple[list[float], list[float]] = ([], [])
    series_w: tuple[list[float], list[float]] = ([], [])
    sum_w = [0.0, 0.0]
    shortest = start
    ranked = start_alt
    sig = marks.sigma.tolist()
    xis = marks.xi.tolist()
    for step in range(len(marks) + 1):
        checked = shortest
        if step == corrupt_step:
            checked = _corrupted(shortest, total_workload(ranked))
        verdict = prec_p(checked, ranked, rank, tol)
        if not verdict:
            v = verdict.first_violation
            report.violations.append(
                StepViolation(f"{v.clause}[{v.index}]", step, v.lhs, v.rhs)
            )
        sum_w[0] += shortest[0]
        sum_w[1] += ranked[0]
        if keep:
            series_t[0].append(total_workload(shortest))
            series_t[1].append(total_workload(ranked))
            series_w[0].append(shortest[0])
            series_w[1].append(ranked[0])
        if step < len(marks):
            mark = (sig[step], xis[step])
            shortest = pth_step(shortest, mark, 1)
            ranked = pth_step(ranked, mark, rank)
    steps = len(marks) + 1
    report.steps_checked = steps
    report.mean_offered_wait = (sum_w[0] / steps, sum_w[1] / steps)
    report.final_profiles = (shortest, ranked)
    if keep:
        report.totals = series_t
        report.offered_waits = series_w
    return report


def fcfs_waiting_times(marks: MarkSequence, servers: int) -> list[float]:
    """Waiting times from an independent event-based FCFS simulation.

    Tracks absolute server-free epochs instead of workload profiles:
    customer k arrives at the cumulative sum of the gaps before it, waits
    for the earliest-free server (ties broken by lowest server index) and
    occupies it for its service requirement. Customer k's waiting time
    equals the least coordinate of the profile recursion's k-th profile,
    up to the rounding drift of absolute epochs.
    """
    if servers < 1:
        raise ValueError(f"servers must be >= 1, got {servers}")
    free = [0.0] * servers
    now = 0.0
    waits: list[float] = []
    for s_, x_ in zip(marks.sigma.tolist(), marks.xi.tolist()):
        j = 0
        best = free[0]
        for i in range(1, servers):
            if free[i] < best:
                best = free[i]
                j = i
        begin = best if best > now else now
        waits.append(begin - now)
        free[j] = begin + s_
        now += x_
    return waits


@dataclass(frozen=True)
class EcdfDominance:
    """Result of the distributional dominance diagnostic."""

    dominates: bool
    max_deficit: float
    violating_fraction: float
    band: float
    grid_points: int


def ecdf_dominance(
    samples_a: Sequence[float], samples_b: Sequence[float], band: float | None = None
) -> EcdfDominance:
    """Check whether ``samples_a`` is stochastically no larger than ``samples_b``.

    Compares empirical CDFs on the merged sample grid and requires
    F_a >= F_b - band everywhere. The default band is the two-sample
    Kolmogorov-Smirnov 95% width 1.36 * sqrt((m + n) / (m * n)). This is a
    statistical diagnostic; it must never gate a pathwise comparison.
    """
    a = np.sort(np.asarray(samples_a, dtype=np.float64))
    b = np.sort(np.asarray(samples_b, dtype=np.float64))
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        raise ValueError("both sample sets must be nonempty")
    if band is None:
        band = 1.36 * math.sqrt((m + n) / (m * n))
    grid = np.concatenate([a, b])
    grid.sort()
    f_a = np.searchsorted(a, grid, side="right") / m
    f_b = np.searchsorted(b, grid, side="right") / n
    deficit = f_b - f_a
    max_deficit = float(max(deficit.max(), 0.0))
    violating = float(np.mean(deficit > band))
    return EcdfDominance(
        dominates=violating == 0.0,
        max_deficit=max_deficit,
        violating_fraction=violating,
        band=float(band),
        grid_points=len(grid),
    )


# --------------------------------------------------------------------------
# CSV serialization. Floats are written with repr (shortest round-trip), line
# endings are LF, the decimal separator is always '.'; reruns with identical
# inputs produce byte-identical files.


def write_trajectory_csv(path: str, trajectories: Iterable[Trajectory]) -> int:
    """Write trajectories in long form: step, system id, coordinate, value.

    Returns the number of data rows written. The system id embeds the seed
    so trajectories from several seeds can share one file.
    """
    rows = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["step", "system", "coordinate", "value"])
        for traj in trajectories:
            system = f"seed{traj.marks_info.seed}:{traj.config.label}"
            for step, profile in enumerate(traj.profiles):
                for i, value in enumerate(profile, start=1):
                    writer.writerow([step, system, i, repr(value)])
                    rows += 1
    return rows


def write_violations_csv(
    path: str, violations: Iterable[tuple[str, StepViolation]]
) -> int:
    """Write (system id, violation) pairs as inequality, step, lhs, rhs rows.

    The system id is folded into the inequality identifier when nonempty.
    Returns the number of data rows written.
    """
    rows = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["inequality", "step", "lhs", "rhs"])
        for system, v in violations:
            name = f"{system}:{v.inequality}" if system else v.inequality
            writer.writerow([name, v.step, repr(v.lhs), repr(v.rhs)])
            rows += 1
    return rows
