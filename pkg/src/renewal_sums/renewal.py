"""Seeded Monte Carlo of renewal processes and their Blackwell limits.

A path starts at S_0 (zero, or a random delay), adds interarrival times
until it passes x + delta, and counts the indices n >= 0 with
S_n in (x, x + delta]. The mean count over paths estimates the renewal
measure U(x, x + delta].

Paths are simulated in fixed blocks of ``BLOCK`` paths. Block ``i`` draws
from its own Philox stream keyed by ``SeedSequence(seed, spawn_key=(i,))``,
and per-block results are integer moment sums, so the estimate is bitwise
identical for any number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from ._rational import DomainError

BLOCK = 1 << 14
MAX_DRAWS_PER_PATH = 10**9


def _real(x, name: str) -> Fraction:
    if isinstance(x, bool):
        raise TypeError(f"{name}: bool is not a number")
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{name}: cannot parse {x!r}") from exc
    return Fraction(x)


@dataclass(frozen=True)
class Uniform:
    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _real(self.a, "a"))
        object.__setattr__(self, "b", _real(self.b, "b"))
        if not self.b > self.a >= 0:
            raise DomainError(f"Uniform needs b > a >= 0, got ({self.a}, {self.b})")


@dataclass(frozen=True)
class Bernoulli:
    p: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _real(self.p, "p"))
        if not 0 < self.p < 1:
            raise DomainError(f"Bernoulli needs p in (0, 1), got {self.p}")


@dataclass(frozen=True)
class BetaMixedBernoulli:
    """Bernoulli(p) interarrivals with p ~ Beta(a, b) drawn once per path."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _real(self.a, "a"))
        object.__setattr__(self, "b", _real(self.b, "b"))
        if self.a <= 0 or self.b <= 0:
            raise DomainError("BetaMixedBernoulli needs a, b > 0")


@dataclass(frozen=True)
class UniformSum:
    """Sum of ``m`` independent Uniform(0, 1) variables (Irwin-Hall)."""

    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError("UniformSum needs m >= 1")


@dataclass(frozen=True)
class ShiftPlusOne:
    inner: "Law"


Law = Union[Uniform, Bernoulli, BetaMixedBernoulli, UniformSum, ShiftPlusOne]


@dataclass(frozen=True)
class InterarrivalSpec:
    """Interarrival law plus an optional delay S_0 = sum of ``delay_uniforms`` uniforms."""

    law: Law
    delay_uniforms: int = 0

    def __post_init__(self) -> None:
        if self.delay_uniforms < 0:
            raise DomainError("delay_uniforms must be >= 0")

    @property
    def base(self) -> Law:
        return _unshift(self.law)[0]

    @property
    def shift(self) -> int:
        return _unshift(self.law)[1]

    @property
    def arithmetic(self) -> bool:
        return isinstance(self.base, (Bernoulli, BetaMixedBernoulli))

    @property
    def mixed(self) -> bool:
        return isinstance(self.base, BetaMixedBernoulli)

    def mean(self) -> Fraction:
        """Mean interarrival time (for a mixed law, averaged over p)."""
        base, s = self.base, self.shift
        if isinstance(base, Uniform):
            m = (base.a + base.b) / 2
        elif isinstance(base, Bernoulli):
            m = base.p
        elif isinstance(base, UniformSum):
            m = Fraction(base.m, 2)
        else:
            m = base.a / (base.a + base.b)
        return m + s

    @classmethod
    def parse(cls, text: str, delay_uniforms: int = 0) -> InterarrivalSpec:
        """Parse ``uniform:a,b``, ``bernoulli:p``, ``betabern:a,b``, ``usum:m`` or ``shift1:<law>``."""
        return cls(parse_law(text), delay_uniforms)


def parse_law(text: str) -> Law:
    name, _, rest = text.strip().partition(":")
    name = name.lower()
    if name == "shift1":
        return ShiftPlusOne(parse_law(rest))
    args = [x for x in rest.split(",") if x.strip()]
    try:
        if name == "uniform" and len(args) == 2:
            return Uniform(*args)
        if name == "bernoulli" and len(args) == 1:
            return Bernoulli(args[0])
        if name == "betabern" and len(args) == 2:
            return BetaMixedBernoulli(*args)
        if name == "usum" and len(args) == 1:
            return UniformSum(int(args[0]))
    except ValueError as exc:
        raise DomainError(f"bad law {text!r}: {exc}") from exc
    raise DomainError(f"cannot parse law {text!r}; expected uniform:a,b | bernoulli:p | betabern:a,b | usum:m | shift1:<law>")


def _unshift(law: Law) -> tuple[Law, int]:
    s = 0
    while isinstance(law, ShiftPlusOne):
        law, s = law.inner, s + 1
    return law, s


def _mixed_reciprocal_mean(a: Fraction, b: Fraction, s: int) -> Fraction:
    """E[1/(s + p)], p ~ Beta(a, b), to 1e-30."""
    if s == 0:
        if a <= 1:
            raise DomainError("E[1/p] is infinite for a <= 1")
        return (a + b - 1) / (a - 1)
    # 1/(s+p) = sum_j (1-p)^j / (s+1)^(j+1)
    total, term, j = Fraction(0), Fraction(1, s + 1), 0
    while term * (s + 1) / s > Fraction(1, 10**30):
        total += term
        term = term * (b + j) / ((a + b + j) * (s + 1))
        j += 1
    return total


def theoretical_blackwell_limit(spec: InterarrivalSpec, delta) -> Fraction:
    """lim_x U(x, x + delta] = delta / mu.

    Arithmetic laws (Bernoulli-based, span 1) only admit delta = 1. For a
    Beta-mixed law the count is averaged over p, giving delta E[1/mu(p)].
    """
    delta = _real(delta, "delta")
    if delta <= 0:
        raise DomainError("delta must be > 0")
    if spec.arithmetic and delta != 1:
        raise DomainError("arithmetic law with span 1: delta must equal 1")
    if spec.mixed:
        base = spec.base
        return delta * _mixed_reciprocal_mean(base.a, base.b, spec.shift)
    return delta / spec.mean()


@dataclass(frozen=True)
class RenewalEstimate:
    mean_count: float
    std_error: float
    paths: int
    interval: tuple[float, float]

    def within(self, reference, sigmas: float = 4.0) -> bool:
        return abs(self.mean_count - float(reference)) <= sigmas * self.std_error

    def to_record(self) -> dict:
        return {
            "mean": repr(self.mean_count),
            "std_error": repr(self.std_error),
            "paths": self.paths,
            "interval": [repr(self.interval[0]), repr(self.interval[1])],
        }


# -- simulation core ---------------------------------------------------------------


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _draw(rng: np.random.Generator, base: Law, shift: int, p_path: np.ndarray | None, shape: tuple[int, int]) -> np.ndarray:
    if isinstance(base, Uniform):
        x = float(base.a) + float(base.b - base.a) * rng.random(shape)
    elif isinstance(base, Bernoulli):
        x = (rng.random(shape) < float(base.p)).astype(np.float64)
    elif isinstance(base, BetaMixedBernoulli):
        x = (rng.random(shape) < p_path[:, None]).astype(np.float64)
    else:
        x = rng.random((shape[0], shape[1], base.m)).sum(axis=2)
    if shift:
        x += shift
    return x


def _simulate_block(spec: InterarrivalSpec, lo: float, hi: float, size: int, modulus: int, seed: int, block: int) -> np.ndarray:
    """Per-path arrival counts in (lo, hi], split by n mod ``modulus``."""
    rng = _block_rng(seed, block)
    base, shift = spec.base, spec.shift
    p_path = None
    if isinstance(base, BetaMixedBernoulli):
        p_path = rng.beta(float(base.a), float(base.b), size=size)
    if spec.delay_uniforms:
        s = rng.random((size, spec.delay_uniforms)).sum(axis=1)
    else:
        s = np.zeros(size)
    counts = np.zeros((size, modulus), dtype=np.int64)
    counts[:, 0] += (s > lo) & (s <= hi)

    mean = float(spec.mean()) if not spec.mixed else None
    active = np.flatnonzero(s <= hi)
    n = 0  # index of the last partial sum already examined
    while active.size:
        if spec.mixed:
            mu = np.maximum(p_path[active] + shift, 1e-3)
            steps = float(np.median((hi - s[active]) / mu))
        else:
            steps = float(np.max(hi - s[active])) / mean
        length = int(min(4096, max(16, math.ceil(1.2 * steps) + 4)))
        if n + length > MAX_DRAWS_PER_PATH:
            raise RuntimeError(f"path exceeded {MAX_DRAWS_PER_PATH} draws")
        x = _draw(rng, base, shift, None if p_path is None else p_path[active], (active.size, length))
        partial = np.cumsum(x, axis=1)
        partial += s[active, None]
        hit = (partial > lo) & (partial <= hi)
        for r in range(modulus):
            # column c holds S_{n + 1 + c}
            first = (r - n - 1) % modulus
            counts[active, r] += hit[:, first::modulus].sum(axis=1)
        s[active] = partial[:, -1]
        n += length
        active = active[s[active] <= hi]
    return counts


def _moments(counts: np.ndarray) -> tuple[list[int], list[list[int]]]:
    first = [int(v) for v in counts.sum(axis=0)]
    second = [[int(v) for v in row] for row in counts.T @ counts]
    return first, second


def _run(spec: InterarrivalSpec, x, delta, paths: int, seed: int, modulus: int, n_jobs: int):
    x, delta = _real(x, "x"), _real(delta, "delta")
    if x < 0 or delta <= 0:
        raise DomainError("need x >= 0 and delta > 0")
    if paths < 1:
        raise DomainError("paths must be >= 1")
    if not 0 <= int(seed) < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")
    lo, hi = float(x), float(x + delta)
    sizes = [min(BLOCK, paths - start) for start in range(0, paths, BLOCK)]

    def job(i: int):
        return _moments(_simulate_block(spec, lo, hi, sizes[i], modulus, int(seed), i))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    first = [sum(p[0][r] for p in parts) for r in range(modulus)]
    second = [[sum(p[1][r][s] for p in parts) for s in range(modulus)] for r in range(modulus)]
    return first, second, (lo, hi)


def _estimate(weights: Sequence[Fraction], first, second, paths: int, interval) -> RenewalEstimate:
    total = sum(w * f for w, f in zip(weights, first))
    total_sq = sum(wr * ws * second[r][s] for r, wr in enumerate(weights) for s, ws in enumerate(weights))
    mean = Fraction(total, paths)
    if paths > 1:
        var = (total_sq - paths * mean * mean) / (paths - 1)
        se = math.sqrt(float(var) / paths)
    else:
        se = 0.0
    return RenewalEstimate(float(mean), se, paths, interval)


def simulate_count(spec: InterarrivalSpec, x, delta, paths: int, seed: int, n_jobs: int = 1) -> RenewalEstimate:
    """Estimate U(x, x + delta], the expected number of n >= 0 with S_n in (x, x + delta]."""
    first, second, interval = _run(spec, x, delta, paths, seed, 1, n_jobs)
    return _estimate([Fraction(1)], first, second, paths, interval)


def simulate_contrast_sum(spec: InterarrivalSpec, contrast: Sequence, x, delta, paths: int, seed: int, n_jobs: int = 1) -> RenewalEstimate:
    """Estimate sum_n c[n mod m] P(S_n in (x, x + delta]) for a contrast c."""
    weights = [_real(c, "contrast") for c in contrast]
    if not weights or sum(weights) != 0:
        raise DomainError("not a contrast: entries must sum to exactly 0")
    first, second, interval = _run(spec, x, delta, paths, seed, len(weights), n_jobs)
    return _estimate(weights, first, second, paths, interval)


def simulate_path_counts(spec: InterarrivalSpec, x, delta, paths: int, seed: int) -> np.ndarray:
    """Per-path arrival counts (same streams as :func:`simulate_count`)."""
    x, delta = _real(x, "x"), _real(delta, "delta")
    lo, hi = float(x), float(x + delta)
    out = [_simulate_block(spec, lo, hi, min(BLOCK, paths - start), 1, int(seed), i)[:, 0] for i, start in enumerate(range(0, paths, BLOCK))]
    return np.concatenate(out)
