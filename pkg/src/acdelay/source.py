"""Source models: memoryless and first-order Markov, with exact sampling.

Both models expose the same small protocol used by the coder and the
experiment harness:

``n_letters``
    alphabet size K; letters are ``0 .. K-1``.
``next_probs(prev)``
    distribution of the next letter given the previous letter (``None`` at
    the start of a sequence).
``scale`` / ``cum_table(prev)``
    the same distribution as integer cumulative counts over the common
    denominator ``scale``; the coder runs on these integers.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Sequence

from .exact import as_fraction

__all__ = [
    "SourceValidationError",
    "ReducibleChainError",
    "MemorylessSource",
    "MarkovSource",
    "ErgodicityReport",
    "make_memoryless",
    "conditional_prob",
    "sample_sequence",
    "stationary_distribution",
    "communicating_classes",
    "gamma",
    "gamma_sequence",
    "xi",
    "GammaTable",
    "check_bounded_delay_condition",
    "expand_order",
    "max_product_matmul",
    "max_product_power",
]


class SourceValidationError(ValueError):
    pass


class ReducibleChainError(ValueError):
    def __init__(self, classes):
        self.classes = [tuple(c) for c in classes]
        super().__init__(f"chain is reducible; communicating classes: {self.classes}")


def _check_distribution(row, what: str, *, strict: bool) -> tuple:
    try:
        row = tuple(as_fraction(p) for p in row)
    except (TypeError, ValueError) as exc:
        raise SourceValidationError(f"{what}: {exc}") from None
    for i, p in enumerate(row):
        if p < 0 or (strict and p == 0):
            kind = "positive" if strict else "non-negative"
            raise SourceValidationError(f"{what}: entry {i} = {p} is not {kind}")
    total = sum(row, Fraction(0))
    if total != 1:
        raise SourceValidationError(f"{what}: entries sum to {total}, not 1")
    return row


def _cumulative(row, scale: int) -> tuple:
    acc, out = 0, [0]
    for p in row:
        acc += p.numerator * (scale // p.denominator)
        out.append(acc)
    return tuple(out)


class _SourceBase:
    n_letters: int

    def check_letter(self, letter) -> int:
        if not isinstance(letter, int) or not 0 <= letter < self.n_letters:
            raise ValueError(f"letter {letter!r} outside alphabet 0..{self.n_letters - 1}")
        return letter

    def cum_table(self, prev):
        return self._tables[prev]

    def sequence_prob(self, letters: Sequence[int]) -> Fraction:
        prob, prev = Fraction(1), None
        for x in letters:
            prob *= self.next_probs(prev)[self.check_letter(x)]
            prev = x
        return prob


@dataclass(frozen=True, eq=False)
class MemorylessSource(_SourceBase):
    """i.i.d. letters with exact probabilities ``probs``."""

    probs: tuple

    def __post_init__(self):
        probs = _check_distribution(self.probs, "letter probabilities", strict=True)
        if len(probs) < 2:
            raise SourceValidationError("alphabet needs at least two letters")
        object.__setattr__(self, "probs", probs)

    @property
    def n_letters(self) -> int:
        return len(self.probs)

    def alpha(self) -> Fraction:
        return max(self.probs)

    def beta(self) -> Fraction:
        return min(self.probs)

    def next_probs(self, prev=None) -> tuple:
        return self.probs

    @cached_property
    def scale(self) -> int:
        return math.lcm(*(p.denominator for p in self.probs))

    @cached_property
    def _tables(self):
        table = _cumulative(self.probs, self.scale)
        return _Constant(table)

    def __eq__(self, other):
        return isinstance(other, MemorylessSource) and self.probs == other.probs

    def __hash__(self):
        return hash(self.probs)

    def __repr__(self):
        return f"MemorylessSource({', '.join(map(str, self.probs))})"


class _Constant:
    def __init__(self, value):
        self.value = value

    def __getitem__(self, key):
        return self.value


def make_memoryless(probs) -> MemorylessSource:
    return MemorylessSource(tuple(probs))


@dataclass(frozen=True, eq=False)
class MarkovSource(_SourceBase):
    """First-order chain whose states are the letters.

    ``initial`` defaults to the exact stationary distribution (which requires
    an irreducible chain). ``order`` records the order of the source the chain
    was expanded from; see :func:`expand_order`.
    """

    transition: tuple
    initial: tuple | None = None
    order: int = 1
    history_letters: int | None = field(default=None)

    def __post_init__(self):
        rows = tuple(
            _check_distribution(row, f"transition row {i}", strict=False)
            for i, row in enumerate(self.transition)
        )
        k = len(rows)
        if k < 1:
            raise SourceValidationError("chain needs at least one state")
        for i, row in enumerate(rows):
            if len(row) != k:
                raise SourceValidationError(f"transition row {i} has {len(row)} entries, expected {k}")
        object.__setattr__(self, "transition", rows)
        if self.initial is None:
            init = stationary_distribution(self)
        else:
            init = _check_distribution(self.initial, "initial distribution", strict=False)
            if len(init) != k:
                raise SourceValidationError(f"initial distribution has {len(init)} entries, expected {k}")
        object.__setattr__(self, "initial", init)
        if self.order < 1:
            raise SourceValidationError("order must be positive")

    @property
    def n_letters(self) -> int:
        return len(self.transition)

    @property
    def n_states(self) -> int:
        return len(self.transition)

    def next_probs(self, prev=None) -> tuple:
        return self.initial if prev is None else self.transition[prev]

    def is_stationary(self) -> bool:
        k = self.n_states
        return all(
            sum(self.initial[i] * self.transition[i][j] for i in range(k)) == self.initial[j]
            for j in range(k)
        )

    @cached_property
    def scale(self) -> int:
        dens = [p.denominator for row in self.transition + (self.initial,) for p in row]
        return math.lcm(*dens)

    @cached_property
    def _tables(self):
        tables = {i: _cumulative(row, self.scale) for i, row in enumerate(self.transition)}
        tables[None] = _cumulative(self.initial, self.scale)
        return tables

    def reachable_states(self) -> list:
        """States visited with positive probability at some time under ``initial``."""
        seen = {i for i, p in enumerate(self.initial) if p > 0}
        stack = list(seen)
        while stack:
            i = stack.pop()
            for j, p in enumerate(self.transition[i]):
                if p > 0 and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return sorted(seen)

    def __repr__(self):
        rows = "; ".join(" ".join(map(str, r)) for r in self.transition)
        return f"MarkovSource([{rows}], order={self.order})"


def conditional_prob(source, history: Sequence[int], next_letter: int) -> Fraction:
    source.check_letter(next_letter)
    prev = None
    if history:
        prev = source.check_letter(history[-1])
    return source.next_probs(prev)[next_letter]


def draw_letter(cum: Sequence[int], scale: int, bits: Iterator[int]) -> int:
    """Pick the CDF cell hit by a lazily refined uniform dyadic point.

    The random point is known to lie in ``[u/2^m, (u+1)/2^m)``; bits are drawn
    until that interval fits inside one cell ``[cum[i], cum[i+1]) / scale``.
    """
    u = m = 0
    while True:
        u = 2 * u + next(bits)
        m += 1
        i = bisect_right(cum, (u * scale) >> m) - 1
        if (u + 1) * scale <= cum[i + 1] << m:
            return i


def sample_sequence(source, n: int, bits: Iterable[int], history: Sequence[int] = ()) -> list:
    """Draw ``n`` letters exactly, continuing after ``history``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    bits = iter(bits)
    prev = history[-1] if history else None
    out = []
    for _ in range(n):
        prev = draw_letter(source.cum_table(prev), source.scale, bits)
        out.append(prev)
    return out


def _reachability(transition) -> list:
    k = len(transition)
    reach = []
    for s in range(k):
        seen, stack = {s}, [s]
        while stack:
            i = stack.pop()
            for j, p in enumerate(transition[i]):
                if p > 0 and j not in seen:
                    seen.add(j)
                    stack.append(j)
        reach.append(seen)
    return reach


def communicating_classes(transition) -> list:
    reach = _reachability(transition)
    classes, assigned = [], set()
    for s in range(len(transition)):
        if s in assigned:
            continue
        cls = sorted(t for t in reach[s] if s in reach[t])
        assigned.update(cls)
        classes.append(tuple(cls))
    return classes


def _class_period(transition, cls) -> int:
    members = set(cls)
    level = {cls[0]: 0}
    queue = [cls[0]]
    period = 0
    for i in queue:
        for j, p in enumerate(transition[i]):
            if p > 0 and j in members:
                if j not in level:
                    level[j] = level[i] + 1
                    queue.append(j)
                else:
                    period = math.gcd(period, level[i] + 1 - level[j])
    return period


def stationary_distribution(chain) -> tuple:
    """Exact solution of ``pi P = pi``, ``sum(pi) = 1`` by Gaussian elimination."""
    transition = chain.transition if hasattr(chain, "transition") else chain
    k = len(transition)
    classes = communicating_classes(transition)
    if len(classes) > 1:
        raise ReducibleChainError(classes)
    # rows: (P^T - I) pi = 0 with the last equation replaced by normalisation
    a = [
        [Fraction(transition[j][i]) - (1 if i == j else 0) for j in range(k)] + [Fraction(0)]
        for i in range(k)
    ]
    a[-1] = [Fraction(1)] * k + [Fraction(1)]
    for col in range(k):
        piv = next(r for r in range(col, k) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(k):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return tuple(a[i][k] for i in range(k))


def max_product_matmul(a, b) -> list:
    n, m = len(a), len(b[0])
    return [
        [max(a[i][t] * b[t][j] for t in range(len(b))) for j in range(m)]
        for i in range(n)
    ]


def max_product_power(mat, d: int) -> list:
    """``d``-th power of ``mat`` in the (max, x) semiring, by repeated squaring."""
    k = len(mat)
    result = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    base = [list(row) for row in mat]
    while d:
        if d & 1:
            result = max_product_matmul(result, base)
        d >>= 1
        if d:
            base = max_product_matmul(base, base)
    return result


def gamma(source, d: int) -> Fraction:
    """Largest conditional probability of any ``d``-letter continuation."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if isinstance(source, MemorylessSource):
        return source.alpha() ** d
    power = max_product_power(source.transition, d)
    return max(max(power[s]) for s in source.reachable_states())


def gamma_sequence(source, d_max: int) -> list:
    """``[gamma(source, d) for d in 1..d_max]`` computed incrementally."""
    if isinstance(source, MemorylessSource):
        a = source.alpha()
        return [a**d for d in range(1, d_max + 1)]
    p = source.transition
    k = len(p)
    states = source.reachable_states()
    v = [Fraction(1)] * k
    out = []
    for _ in range(d_max):
        v = [max(p[i][j] * v[j] for j in range(k)) for i in range(k)]
        out.append(max(v[s] for s in states))
    return out


class GammaTable:
    """Callable ``d -> gamma(d)`` that extends its cache incrementally."""

    def __init__(self, source):
        self.source = source
        self._values: list = []

    def __call__(self, d: int) -> Fraction:
        if d < 1:
            raise ValueError("d must be >= 1")
        if d > len(self._values):
            self._values = gamma_sequence(self.source, max(d, 2 * len(self._values)))
        return self._values[d - 1]


def xi(source) -> Fraction:
    return gamma(source, source.n_letters)


@dataclass(frozen=True)
class ErgodicityReport:
    irreducible: bool
    aperiodic: bool
    xi: Fraction
    deterministic_cycle: bool
    period: int = 1
    classes: tuple = ()

    @property
    def certified(self) -> bool:
        """Whether ``gamma(d) <= xi**(d // K)`` decays geometrically."""
        return self.xi < 1

    def summary(self) -> str:
        lines = [
            f"irreducible: {self.irreducible}",
            f"aperiodic: {self.aperiodic} (period {self.period})",
            f"xi: {self.xi}",
        ]
        if self.certified:
            lines.append("bounded expected delay: certified (xi < 1)")
        else:
            lines.append("bounded expected delay: not certified (xi = 1, deterministic cycle)")
        if not self.irreducible:
            lines.append(f"communicating classes: {list(self.classes)}")
        return "\n".join(lines)


def check_bounded_delay_condition(source) -> ErgodicityReport:
    x = xi(source)
    if isinstance(source, MemorylessSource):
        return ErgodicityReport(True, True, x, x == 1, 1, (tuple(range(source.n_letters)),))
    classes = communicating_classes(source.transition)
    periods = [_class_period(source.transition, c) for c in classes]
    # a class without internal edges (transient singleton) has no period
    period = periods[0] if len(classes) == 1 else math.gcd(*periods)
    return ErgodicityReport(
        irreducible=len(classes) == 1,
        aperiodic=all(p == 1 for p in periods),
        xi=x,
        deterministic_cycle=x == 1,
        period=period,
        classes=tuple(classes),
    )


def expand_order(conditionals, n_letters: int, order: int, initial=None) -> MarkovSource:
    """First-order chain on length-``order`` histories of an order-``order`` source.

    ``conditionals`` lists the next-letter distribution for each history, in
    lexicographic order of the history (oldest letter first), or maps history
    tuples to distributions. Composite state ``(h1..hr)`` moves to
    ``(h2..hr, y)`` with probability ``P(y | h1..hr)``. Without ``initial`` the
    stationary law is used, or the uniform law when the chain is reducible.
    """
    if order < 1:
        raise SourceValidationError("order must be positive")
    histories = list(product(range(n_letters), repeat=order))
    if isinstance(conditionals, dict):
        try:
            rows = [conditionals[h] for h in histories]
        except KeyError as exc:
            raise SourceValidationError(f"missing conditional for history {exc.args[0]}") from None
    else:
        rows = list(conditionals)
    if len(rows) != len(histories):
        raise SourceValidationError(
            f"expected {len(histories)} conditional rows for order {order}, got {len(rows)}"
        )
    if order == 1:
        trans = rows
    else:
        index = {h: i for i, h in enumerate(histories)}
        trans = []
        for h, row in zip(histories, rows):
            row = _check_distribution(row, f"conditional for history {h}", strict=False)
            if len(row) != n_letters:
                raise SourceValidationError(f"conditional for history {h} has {len(row)} entries")
            out = [Fraction(0)] * len(histories)
            for y, p in enumerate(row):
                out[index[h[1:] + (y,)]] = p
            trans.append(out)
    if initial is None and len(communicating_classes(
        [[as_fraction(p) for p in r] for r in trans]
    )) > 1:
        initial = [Fraction(1, len(histories))] * len(histories)
    return MarkovSource(tuple(map(tuple, trans)), initial, order=order,
                        history_letters=n_letters)
