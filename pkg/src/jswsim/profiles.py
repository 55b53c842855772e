"""Workload profiles and the one-step recursion of parallel single queues.

A profile is the nondecreasing vector of residual workloads of the servers,
kept as a plain tuple of nonnegative floats. An arriving customer brings a
service requirement ``sigma`` and is followed by the next customer after an
inter-arrival gap ``xi``. Routing the arrival to the queue with the p-th
least workload, ageing all queues by the gap, clamping at zero and
re-sorting yields the profile seen by the next customer (the
Kiefer-Wolfowitz recursion when p is 1, i.e. join the shortest workload).

All functions here are pure and never mutate their arguments.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

__all__ = [
    "Mark",
    "Profile",
    "kw_step",
    "offered_wait",
    "pad",
    "pth_step",
    "sort_ascending",
    "sort_raw",
    "total_workload",
    "zero_profile",
]


class Mark(NamedTuple):
    """Per-customer input: service requirement and gap to the next arrival."""

    sigma: float
    xi: float


# Nondecreasing tuple of nonnegative floats, length >= 1.
Profile = tuple[float, ...]


def sort_raw(values: Iterable[float]) -> tuple[float, ...]:
    """Nondecreasing rearrangement of an arbitrary real vector.

    Negative entries are permitted; non-finite entries are rejected.
    """
    vals = [float(x) for x in values]
    for x in vals:
        if not math.isfinite(x):
            raise ValueError(f"non-finite entry {x!r}")
    vals.sort()
    return tuple(vals)


def sort_ascending(values: Iterable[float]) -> Profile:
    """Nondecreasing rearrangement of a nonnegative workload vector.

    Rejects empty input, negative entries and non-finite entries. Use
    :func:`sort_raw` for signed vectors.
    """
    out = sort_raw(values)
    if not out:
        raise ValueError("a workload profile needs at least one server")
    if out[0] < 0.0:
        raise ValueError(f"negative entry {out[0]!r} in workload profile")
    return out


def zero_profile(servers: int) -> Profile:
    """The empty-system profile for the given number of servers."""
    if servers < 1:
        raise ValueError("a workload profile needs at least one server")
    return (0.0,) * servers


def pth_step(u: Profile, mark: Mark, rank: int) -> Profile:
    """Advance one arrival that joins the queue with the rank-th least workload.

    The service requirement is added at coordinate ``rank``, every queue is
    aged by the inter-arrival gap, negative residuals are clamped to zero
    and the result is re-sorted.
    """
    servers = len(u)
    if servers == 0:
        raise ValueError("a workload profile needs at least one server")
    if not 1 <= rank <= servers:
        raise ValueError(f"allocation rank {rank} outside [1, {servers}]")
    sigma, xi = mark
    vals = [x - xi for x in u]
    vals[rank - 1] = (u[rank - 1] + sigma) - xi
    return tuple(sorted(0.0 if v <= 0.0 else v for v in vals))


def kw_step(u: Profile, mark: Mark) -> Profile:
    """Advance one arrival under join-the-shortest-workload routing."""
    return pth_step(u, mark, 1)


def pad(profile: Profile, servers: int) -> Profile:
    """Embed a profile into a wider system by prepending idle servers."""
    n = len(profile)
    if servers < n:
        raise ValueError(f"cannot pad a {n}-server profile down to {servers}")
    return (0.0,) * (servers - n) + tuple(profile)


def total_workload(u: Profile) -> float:
    """Sum of all residual workloads (exactly rounded)."""
    return math.fsum(u)


def offered_wait(u: Profile) -> float:
    """Waiting time offered to an arrival, i.e. the least residual workload."""
    return u[0]
