"""Seeded generators for customer mark sequences.

A mark sequence is the per-customer input of a simulation: service
requirement ``sigma`` (nonnegative) and inter-arrival gap ``xi`` (strictly
positive), for ``length`` consecutive customers.

Reproducibility contract
------------------------
All randomness comes from the Philox 4x64 counter-based generator. Stream 0
of a seed drives the marks, stream 1 drives the modulating chain of a
Markov-modulated model (the two streams use the Philox key ``(seed, stream)``).
Raw 64-bit words are mapped to uniforms in the open interval (0, 1) by
``u = (top 52 bits + 1/2) * 2**-52``, and every law transforms uniforms
through a fixed inverse-CDF code path. For each mark the sigma draw consumes
its uniforms first, then the xi draw, so a longer sequence for the same
(model, seed) extends a shorter one without changing its prefix. The
algorithm identifier below is stored on every generated sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Iterator, Sequence

import numpy as np

from .errors import ConfigError, InputError
from .profiles import Mark

__all__ = [
    "RNG_ALGORITHM",
    "Deterministic",
    "Exponential",
    "Hyperexponential",
    "IIDModel",
    "InputModel",
    "MarkSequence",
    "MarkovModulatedModel",
    "StabilityVerdict",
    "TraceModel",
    "Uniform",
    "generate",
    "mean_is_estimate",
    "mean_sigma",
    "mean_xi",
    "model_label",
    "stability_check",
]

RNG_ALGORITHM = "philox4x64/u52/inverse-cdf"

_CRITICALITY_REL_TOL = 1e-12


def _uniforms(seed: int, stream: int, count: int) -> np.ndarray:
    """``count`` uniforms in (0, 1) from Philox stream ``stream`` of ``seed``."""
    key = np.array([seed % 2**64, stream], dtype=np.uint64)
    raw = np.random.Philox(key=key).random_raw(count)
    return ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


# --------------------------------------------------------------------------
# Distribution laws. Each law knows how many uniforms one draw consumes and
# maps them to a sample through a single scalar code path, so batch and
# step-by-step generation are bit-identical.


@dataclass(frozen=True)
class Exponential:
    rate: float
    uniforms: ClassVar[int] = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0.0):
            raise ConfigError(f"exponential rate must be positive, got {self.rate!r}")

    def mean(self) -> float:
        return 1.0 / self.rate

    def min_support(self) -> float:
        return 0.0

    def positive(self) -> bool:
        # draws use uniforms in the open interval, so 0 is never returned
        return True

    def draw(self, us: Sequence[float]) -> float:
        return -math.log1p(-us[0]) / self.rate

    def draw_batch(self, cols: Sequence[Sequence[float]], n: int) -> list[float]:
        rate = self.rate
        return [-math.log1p(-u) / rate for u in cols[0]]

    def label(self) -> str:
        return f"exponential({self.rate!r})"


@dataclass(frozen=True)
class Deterministic:
    value: float
    uniforms: ClassVar[int] = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise ConfigError(f"deterministic value must be >= 0, got {self.value!r}")

    def mean(self) -> float:
        return self.value

    def min_support(self) -> float:
        return self.value

    def positive(self) -> bool:
        return self.value > 0.0

    def draw(self, us: Sequence[float]) -> float:
        return self.value

    def draw_batch(self, cols: Sequence[Sequence[float]], n: int) -> list[float]:
        return [self.value] * n

    def label(self) -> str:
        return f"deterministic({self.value!r})"


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float
    uniforms: ClassVar[int] = 1

    def __post_init__(self) -> None:
        ok = math.isfinite(self.lo) and math.isfinite(self.hi) and 0.0 <= self.lo <= self.hi
        if not ok:
            raise ConfigError(f"uniform bounds need 0 <= lo <= hi, got ({self.lo!r}, {self.hi!r})")

    def mean(self) -> float:
        return (self.lo + self.hi) / 2.0

    def min_support(self) -> float:
        return self.lo

    def positive(self) -> bool:
        return self.lo > 0.0

    def draw(self, us: Sequence[float]) -> float:
        return self.lo + us[0] * (self.hi - self.lo)

    def draw_batch(self, cols: Sequence[Sequence[float]], n: int) -> list[float]:
        lo, span = self.lo, self.hi - self.lo
        return [lo + u * span for u in cols[0]]

    def label(self) -> str:
        return f"uniform({self.lo!r},{self.hi!r})"


@dataclass(frozen=True)
class Hyperexponential:
    """Mixture of exponentials: branch i with probability probs[i], rate rates[i]."""

    probs: tuple[float, ...]
    rates: tuple[float, ...]
    uniforms: ClassVar[int] = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if len(self.probs) != len(self.rates) or not self.probs:
            raise ConfigError("hyperexponential needs matching, nonempty probs and rates")
        if any(p < 0.0 or not math.isfinite(p) for p in self.probs):
            raise ConfigError(f"hyperexponential probabilities must be >= 0, got {self.probs!r}")
        if abs(math.fsum(self.probs) - 1.0) > 1e-9:
            raise ConfigError(f"hyperexponential probabilities must sum to 1, got {self.probs!r}")
        if any(r <= 0.0 or not math.isfinite(r) for r in self.rates):
            raise ConfigError(f"hyperexponential rates must be positive, got {self.rates!r}")
        cum = []
        acc = 0.0
        for p in self.probs:
            acc += p
            cum.append(acc)
        object.__setattr__(self, "_cum", tuple(cum))

    def mean(self) -> float:
        return math.fsum(p / r for p, r in zip(self.probs, self.rates))

    def min_support(self) -> float:
        return 0.0

    def positive(self) -> bool:
        return True

    def _draw2(self, u_branch: float, u_exp: float) -> float:
        for j, c in enumerate(self._cum):  # type: ignore[attr-defined]
            if u_branch < c:
                return -math.log1p(-u_exp) / self.rates[j]
        return -math.log1p(-u_exp) / self.rates[-1]

    def draw(self, us: Sequence[float]) -> float:
        return self._draw2(us[0], us[1])

    def draw_batch(self, cols: Sequence[Sequence[float]], n: int) -> list[float]:
        return [self._draw2(a, b) for a, b in zip(cols[0], cols[1])]

    def label(self) -> str:
        ps = ",".join(repr(p) for p in self.probs)
        rs = ",".join(repr(r) for r in self.rates)
        return f"hyperexponential({ps};{rs})"


Law = Exponential | Deterministic | Uniform | Hyperexponential


def _validate_sigma_law(law: Law, where: str) -> None:
    if law.min_support() < 0.0:
        raise ConfigError(f"{where}: service law must have nonnegative support")


def _validate_xi_law(law: Law, where: str) -> None:
    if not law.positive():
        raise ConfigError(f"{where}: inter-arrival law must have strictly positive support")


# --------------------------------------------------------------------------
# Input models.


@dataclass(frozen=True)
class IIDModel:
    """Independent, identically distributed marks."""

    sigma_law: Law
    xi_law: Law

    def __post_init__(self) -> None:
        _validate_sigma_law(self.sigma_law, "iid model")
        _validate_xi_law(self.xi_law, "iid model")


@dataclass(frozen=True)
class MarkovModulatedModel:
    """Marks drawn from per-state laws of an irreducible modulating chain.

    The initial state is drawn from the chain's stationary distribution;
    subsequent states follow the transition matrix, one step per customer.
    """

    transition: tuple[tuple[float, ...], ...]
    sigma_laws: tuple[Law, ...]
    xi_laws: tuple[Law, ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(float(p) for p in row) for row in self.transition)
        object.__setattr__(self, "transition", rows)
        object.__setattr__(self, "sigma_laws", tuple(self.sigma_laws))
        object.__setattr__(self, "xi_laws", tuple(self.xi_laws))
        n = len(rows)
        if n == 0:
            raise ConfigError("modulating chain needs at least one state")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ConfigError(f"transition row {i} has length {len(row)}, expected {n}")
            if any(p < 0.0 or not math.isfinite(p) for p in row):
                raise ConfigError(f"transition row {i} has entries outside [0, 1]")
            if abs(math.fsum(row) - 1.0) > 1e-9:
                raise ConfigError(f"transition row {i} does not sum to 1")
        if len(self.sigma_laws) != n or len(self.xi_laws) != n:
            raise ConfigError("need one sigma law and one xi law per chain state")
        for s, law in enumerate(self.sigma_laws):
            _validate_sigma_law(law, f"state {s}")
        for s, law in enumerate(self.xi_laws):
            _validate_xi_law(law, f"state {s}")
        if not _strongly_connected(rows):
            raise ConfigError("modulating chain must be irreducible")

    def stationary(self) -> tuple[float, ...]:
        """Stationary distribution by damped power iteration.

        Iterates pi <- pi (I + P) / 2; the damping leaves the fixed point
        unchanged and converges for periodic chains too.
        """
        p = np.asarray(self.transition, dtype=np.float64)
        n = p.shape[0]
        pi = np.full(n, 1.0 / n)
        for _ in range(100_000):
            nxt = 0.5 * (pi + pi @ p)
            if np.abs(nxt - pi).sum() < 1e-14:
                pi = nxt
                break
            pi = nxt
        pi = pi / pi.sum()
        return tuple(float(x) for x in pi)


@dataclass(frozen=True)
class TraceModel:
    """Marks replayed from a text file: one 'sigma xi' pair per line.

    Blank lines are skipped and '#' starts a comment. The seed is ignored
    for generation but still recorded on the resulting sequence.
    """

    path: str


InputModel = IIDModel | MarkovModulatedModel | TraceModel


def _strongly_connected(rows: tuple[tuple[float, ...], ...]) -> bool:
    n = len(rows)
    fwd = [[j for j in range(n) if rows[i][j] > 0.0] for i in range(n)]
    bwd = [[j for j in range(n) if rows[j][i] > 0.0] for i in range(n)]
    for edges in (fwd, bwd):
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                for j in edges[i]:
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
            frontier = nxt
        if len(seen) != n:
            return False
    return True


# --------------------------------------------------------------------------
# Mark sequences.


@dataclass(frozen=True, eq=False)
class MarkSequence:
    """A realized sequence of marks plus everything needed to regenerate it.

    ``model`` is None for sequences assembled directly from arrays; those
    cannot be regenerated from (model, seed) and are labeled "external".
    """

    sigma: np.ndarray
    xi: np.ndarray
    seed: int
    model: InputModel | None
    algorithm: str = RNG_ALGORITHM

    def __post_init__(self) -> None:
        self.sigma.setflags(write=False)
        self.xi.setflags(write=False)

    def __len__(self) -> int:
        return len(self.sigma)

    def __getitem__(self, i: int) -> Mark:
        return Mark(float(self.sigma[i]), float(self.xi[i]))

    def __iter__(self) -> Iterator[Mark]:
        return (Mark(s, x) for s, x in zip(self.sigma.tolist(), self.xi.tolist()))

    def reversed_marks(self) -> "MarkSequence":
        """The same marks in reverse order."""
        return MarkSequence(
            sigma=self.sigma[::-1].copy(),
            xi=self.xi[::-1].copy(),
            seed=self.seed,
            model=self.model,
            algorithm=self.algorithm,
        )


def _generate_iid(sigma_law: Law, xi_law: Law, seed: int, length: int) -> tuple[list[float], list[float]]:
    ks = sigma_law.uniforms
    kx = xi_law.uniforms
    ku = ks + kx
    u = _uniforms(seed, 0, length * ku).tolist()
    sigma_cols = [u[c::ku] for c in range(ks)]
    xi_cols = [u[ks + c::ku] for c in range(kx)]
    return sigma_law.draw_batch(sigma_cols, length), xi_law.draw_batch(xi_cols, length)


def _pick_state(cum: Sequence[float], u: float) -> int:
    for j, c in enumerate(cum):
        if u < c:
            return j
    return len(cum) - 1


def _generate_markov(model: MarkovModulatedModel, seed: int, length: int) -> tuple[list[float], list[float]]:
    n = len(model.transition)
    if n == 1:
        # a single-state chain is exactly the iid model with that state's laws
        return _generate_iid(model.sigma_laws[0], model.xi_laws[0], seed, length)
    mod = _uniforms(seed, 1, length).tolist()

    def cumulative(row: Sequence[float]) -> tuple[float, ...]:
        acc = 0.0
        out = []
        for p in row:
            acc += p
            out.append(acc)
        return tuple(out)

    cum_rows = [cumulative(row) for row in model.transition]
    state = _pick_state(cumulative(model.stationary()), mod[0])
    states = [state]
    for t in range(1, length):
        state = _pick_state(cum_rows[state], mod[t])
        states.append(state)

    total = sum(model.sigma_laws[s].uniforms + model.xi_laws[s].uniforms for s in states)
    u = _uniforms(seed, 0, total).tolist()
    sig: list[float] = []
    xis: list[float] = []
    i = 0
    for s in states:
        slaw = model.sigma_laws[s]
        xlaw = model.xi_laws[s]
        sig.append(slaw.draw(u[i : i + slaw.uniforms]))
        i += slaw.uniforms
        xis.append(xlaw.draw(u[i : i + xlaw.uniforms]))
        i += xlaw.uniforms
    return sig, xis


def _read_trace(path: str) -> tuple[list[float], list[float]]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as exc:
        raise InputError(f"cannot read trace file {path!r}: {exc}") from exc
    sig: list[float] = []
    xis: list[float] = []
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        fields = body.split()
        if len(fields) != 2:
            raise InputError(f"{path}:{lineno}: expected 'sigma xi', got {body!r}")
        try:
            s, x = float(fields[0]), float(fields[1])
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
        if not (math.isfinite(s) and s >= 0.0):
            raise InputError(f"{path}:{lineno}: service requirement must be >= 0, got {s!r}")
        if not (math.isfinite(x) and x > 0.0):
            raise InputError(f"{path}:{lineno}: inter-arrival gap must be > 0, got {x!r}")
        sig.append(s)
        xis.append(x)
    return sig, xis


def generate(model: InputModel, seed: int, length: int) -> MarkSequence:
    """Generate ``length`` marks for (model, seed).

    Bit-identical on regeneration, and a longer run extends a shorter one:
    ``generate(m, s, a).sigma == generate(m, s, b).sigma[:a]`` for a <= b.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if isinstance(model, IIDModel):
        sig, xis = _generate_iid(model.sigma_law, model.xi_law, seed, length)
    elif isinstance(model, MarkovModulatedModel):
        sig, xis = _generate_markov(model, seed, length)
    elif isinstance(model, TraceModel):
        sig, xis = _read_trace(model.path)
        if len(sig) < length:
            raise InputError(
                f"trace {model.path!r} has {len(sig)} marks, need {length}"
            )
        sig, xis = sig[:length], xis[:length]
    else:
        raise TypeError(f"unknown input model {model!r}")
    return MarkSequence(
        sigma=np.asarray(sig, dtype=np.float64),
        xi=np.asarray(xis, dtype=np.float64),
        seed=seed,
        model=model,
    )


# --------------------------------------------------------------------------
# Moments and stability.


def mean_sigma(model: InputModel) -> float:
    """Mean service requirement (empirical for trace models)."""
    if isinstance(model, IIDModel):
        return model.sigma_law.mean()
    if isinstance(model, MarkovModulatedModel):
        pi = model.stationary()
        return math.fsum(p * law.mean() for p, law in zip(pi, model.sigma_laws))
    if isinstance(model, TraceModel):
        sig, _ = _read_trace(model.path)
        if not sig:
            raise InputError(f"trace {model.path!r} is empty")
        return math.fsum(sig) / len(sig)
    raise TypeError(f"unknown input model {model!r}")


def mean_xi(model: InputModel) -> float:
    """Mean inter-arrival gap (empirical for trace models)."""
    if isinstance(model, IIDModel):
        return model.xi_law.mean()
    if isinstance(model, MarkovModulatedModel):
        pi = model.stationary()
        return math.fsum(p * law.mean() for p, law in zip(pi, model.xi_laws))
    if isinstance(model, TraceModel):
        _, xis = _read_trace(model.path)
        if not xis:
            raise InputError(f"trace {model.path!r} is empty")
        return math.fsum(xis) / len(xis)
    raise TypeError(f"unknown input model {model!r}")


def mean_is_estimate(model: InputModel) -> bool:
    """True when the means are empirical estimates rather than analytic values."""
    return isinstance(model, TraceModel)


class StabilityVerdict(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    CRITICAL = "critical"


def stability_check(model: InputModel, servers: int) -> StabilityVerdict:
    """Compare mean arriving work against the drain capacity of ``servers`` queues.

    Stable when E[sigma] < servers * E[xi], unstable when greater; ties within
    a relative tolerance of 1e-12 are reported as critical.
    """
    if servers < 1:
        raise ValueError(f"servers must be >= 1, got {servers}")
    work = mean_sigma(model)
    capacity = servers * mean_xi(model)
    if abs(work - capacity) <= _CRITICALITY_REL_TOL * max(work, capacity):
        return StabilityVerdict.CRITICAL
    if work < capacity:
        return StabilityVerdict.STABLE
    return StabilityVerdict.UNSTABLE


def model_label(model: InputModel | None) -> str:
    """Canonical one-line description, used in report headers.

    ``None`` labels mark sequences assembled directly from arrays rather
    than drawn from a model.
    """
    if model is None:
        return "external"
    if isinstance(model, IIDModel):
        return f"iid(sigma={model.sigma_law.label()},xi={model.xi_law.label()})"
    if isinstance(model, MarkovModulatedModel):
        rows = "/".join(" ".join(repr(p) for p in row) for row in model.transition)
        sl = "|".join(law.label() for law in model.sigma_laws)
        xl = "|".join(law.label() for law in model.xi_laws)
        return f"markov(transition={rows};sigma={sl};xi={xl})"
    if isinstance(model, TraceModel):
        return f"trace(path={model.path})"
    raise TypeError(f"unknown input model {model!r}")
