"""Delay experiments: Monte Carlo sampling and exact tail enumeration.

A trial encodes a prefix ``x^n`` and keeps feeding letters drawn from the
source until the bits emitted so far name a binary interval inside
``I(x^n)`` (at which point the decoder holds all of ``x^n``), or until
``d_max`` extra letters have been used, in which case the trial is censored.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..adjacency import DelaySample
from ..coder import Encoder
from ..source import draw_letter, sample_sequence
from .rng import BitStream

__all__ = [
    "ExperimentConfig",
    "DelayStats",
    "EnumerationBudgetError",
    "measure_delay",
    "run_trial",
    "run_monte_carlo",
    "run_exact_tail",
]

DEFAULT_BUDGET = 10**7


class EnumerationBudgetError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    source_path: str | None = None
    n: int = 8
    trials: int = 10_000
    d_max: int = 200
    seed: int = 0
    mode: str = "montecarlo"
    out: str | None = None
    svg: str | None = None
    prefix: tuple | None = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.d_max < 1:
            raise ValueError("d_max must be >= 1")
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if self.mode not in ("montecarlo", "exact-tail"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class DelayStats:
    """Tail ``Pr(D > d)`` for ``d = 0..d_max`` plus mean-delay summary.

    With censored trials the mean counts each censored trial as ``d_max`` and
    is therefore a lower bound. For exact runs ``censored`` is the probability
    mass still undecoded at ``d_max``.
    """

    d_max: int
    tail: list
    mean: object
    stderr: float
    censored: object
    trials: int
    exact: bool
    delays: list = field(default_factory=list, repr=False)

    @property
    def censor_fraction(self):
        return self.censored if self.exact else Fraction(self.censored, self.trials)

    @property
    def mean_is_lower_bound(self) -> bool:
        return self.censored != 0


def measure_delay(source, prefix: Sequence[int], bits, d_max: int) -> DelaySample:
    """Stream letters after ``prefix`` until ``prefix`` is decodable."""
    enc = Encoder(source)
    for x in prefix:
        enc.push(x)
    frame = enc.interval
    for d in range(d_max + 1):
        if enc.covered_by(frame):
            return DelaySample(d, d_max)
        if d == d_max:
            break
        enc.push(draw_letter(source.cum_table(enc.last_letter), source.scale, bits))
    return DelaySample(None, d_max)


def run_trial(source, n: int, d_max: int, seed: int, trial: int, prefix=None):
    bits = BitStream(seed, trial)
    x = list(prefix) if prefix is not None else sample_sequence(source, n, bits)
    return measure_delay(source, x, bits, d_max).delay


def _run_chunk(args):
    source, n, d_max, seed, start, stop, prefix = args
    return [run_trial(source, n, d_max, seed, t, prefix) for t in range(start, stop)]


def _aggregate(delays, d_max, trials) -> DelayStats:
    censored = sum(d is None for d in delays)
    capped = [d_max if d is None else d for d in delays]
    hist = [0] * (d_max + 1)
    for d in capped:
        hist[d] += 1
    tail, above = [], trials
    for d in range(d_max + 1):
        above -= hist[d]
        tail.append(Fraction(above + (censored if d == d_max else 0), trials))
    total = sum(capped)
    mean = Fraction(total, trials)
    if trials > 1:
        var = (Fraction(sum(c * c for c in capped), trials) - mean**2) * Fraction(trials, trials - 1)
        stderr = math.sqrt(var / trials)
    else:
        stderr = math.inf
    return DelayStats(d_max, tail, mean, stderr, censored, trials, False, list(delays))


def run_monte_carlo(source, n: int = 8, trials: int = 10_000, d_max: int = 200,
                    seed: int = 0, prefix=None, workers: int = 1) -> DelayStats:
    """Sample delays; trial ``t`` always uses bit stream ``t`` under ``seed``."""
    if trials < 1 or d_max < 1 or n < 0:
        raise ValueError("need trials >= 1, d_max >= 1, n >= 0")
    if prefix is not None:
        prefix = tuple(source.check_letter(x) for x in prefix)
    if workers <= 1:
        delays = [run_trial(source, n, d_max, seed, t, prefix) for t in range(trials)]
    else:
        size = -(-trials // (4 * workers))
        chunks = [(source, n, d_max, seed, s, min(s + size, trials), prefix)
                  for s in range(0, trials, size)]
        with ProcessPoolExecutor(workers) as pool:
            delays = [d for part in pool.map(_run_chunk, chunks) for d in part]
    return _aggregate(delays, d_max, trials)


def run_exact_tail(source, prefix: Sequence[int], d_max: int,
                   budget: int = DEFAULT_BUDGET) -> DelayStats:
    """Exact ``Pr(D > d | x^n)`` by enumerating extensions.

    A decoded branch stays decoded, so its subtree is pruned; ``budget``
    caps the number of enumerated nodes.
    """
    enc = Encoder(source)
    for x in prefix:
        enc.push(x)
    frame = enc.interval
    undecoded = [Fraction(0)] * (d_max + 1)
    visited = 0
    stack = [(enc, Fraction(1), 0)]
    while stack:
        node, mass, depth = stack.pop()
        visited += 1
        if visited > budget:
            raise EnumerationBudgetError(
                f"more than {budget} extensions to enumerate; use Monte Carlo (simulate) instead"
            )
        if node.covered_by(frame):
            continue
        undecoded[depth] += mass
        if depth == d_max:
            continue
        for y, p in enumerate(source.next_probs(node.last_letter)):
            if p:
                child = node.copy()
                child.push(y)
                stack.append((child, mass * p, depth + 1))
    mean = sum(undecoded[:d_max], Fraction(0))
    return DelayStats(d_max, undecoded, mean, 0.0, undecoded[d_max], 1, True)
