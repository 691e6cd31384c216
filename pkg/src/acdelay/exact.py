"""Exact rational helpers, binary expansions and dyadic interval geometry.

Every real quantity handled by the coder is a :class:`fractions.Fraction`.
Intervals are half-open, ``[low, low + width)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

__all__ = [
    "Fraction",
    "RationalInterval",
    "DyadicInterval",
    "as_fraction",
    "binary_expansion",
    "resolution_depth",
    "ones_count_to_resolution",
    "minimal_covering_dyadic",
    "midpoint",
    "pow2_step_at_most",
    "pow2_step_below",
]


def as_fraction(x) -> Fraction:
    """Coerce an exact number to Fraction; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        if any(c in x for c in ".eE"):
            raise ValueError(f"decimal literal {x!r} is not an exact rational")
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class RationalInterval:
    """Half-open interval ``[low, low + width)`` with exact endpoints."""

    low: Fraction
    width: Fraction

    def __post_init__(self):
        object.__setattr__(self, "low", as_fraction(self.low))
        object.__setattr__(self, "width", as_fraction(self.width))
        if self.width <= 0:
            raise ValueError(f"interval width must be positive, got {self.width}")

    @classmethod
    def from_endpoints(cls, low, high) -> "RationalInterval":
        low, high = as_fraction(low), as_fraction(high)
        return cls(low, high - low)

    @property
    def high(self) -> Fraction:
        return self.low + self.width

    def __contains__(self, x) -> bool:
        return self.low <= x < self.high

    def strictly_contains(self, x) -> bool:
        """True iff ``x`` lies in the interval and is not its left edge."""
        return self.low < x < self.high

    def contains_interval(self, other) -> bool:
        return self.low <= other.low and other.high <= self.high

    def __repr__(self) -> str:
        return f"[{self.low}, {self.high})"


@dataclass(frozen=True)
class DyadicInterval:
    """``[index / 2**level, (index + 1) / 2**level)``; bit string = index in binary."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be non-negative")
        if not 0 <= self.index < (1 << self.level):
            raise ValueError(f"index {self.index} out of range for level {self.level}")

    @classmethod
    def from_bits(cls, bits: str) -> "DyadicInterval":
        if bits and set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        return cls(len(bits), int(bits, 2) if bits else 0)

    @property
    def bits(self) -> str:
        return format(self.index, f"0{self.level}b") if self.level else ""

    @property
    def low(self) -> Fraction:
        return Fraction(self.index, 1 << self.level)

    @property
    def width(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    @property
    def high(self) -> Fraction:
        return Fraction(self.index + 1, 1 << self.level)

    def child(self, bit: int) -> "DyadicInterval":
        return DyadicInterval(self.level + 1, 2 * self.index + bit)

    def __contains__(self, x) -> bool:
        return self.low <= x < self.high

    def contains_interval(self, other) -> bool:
        return self.low <= other.low and other.high <= self.high

    def is_subset_of(self, other) -> bool:
        return other.low <= self.low and self.high <= other.high

    def as_interval(self) -> RationalInterval:
        return RationalInterval(self.low, self.width)

    def __repr__(self) -> str:
        return f"J({self.bits!r})"


def _check_unit(x: Fraction) -> Fraction:
    x = as_fraction(x)
    if not 0 <= x < 1:
        raise ValueError(f"{x} is outside [0, 1)")
    return x


def binary_expansion(x, depth: int) -> str:
    """First ``depth`` binary digits of ``x`` in [0, 1), greedy convention.

    >>> binary_expansion(Fraction(1, 3), 6)
    '010101'
    """
    x = _check_unit(x)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth == 0:
        return ""
    j = (x.numerator << depth) // x.denominator
    return format(j, f"0{depth}b")


def pow2_step_at_most(x) -> int:
    """Smallest ``k >= 0`` with ``2**-k <= x`` (x > 0)."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    ceil_inv = -(-x.denominator // x.numerator)
    return (ceil_inv - 1).bit_length()


def pow2_step_below(x) -> int:
    """Smallest ``k >= 0`` with ``2**-k < x`` (x > 0)."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    return (x.denominator // x.numerator).bit_length()


def resolution_depth(delta) -> int:
    """``ceil(log2(1/delta))``: number of digits that resolve ``delta``."""
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    return pow2_step_at_most(delta)


def ones_count_to_resolution(x, delta) -> int:
    return binary_expansion(x, resolution_depth(delta)).count("1")


def minimal_covering_dyadic(iv: RationalInterval) -> DyadicInterval:
    """Deepest dyadic interval containing ``iv``.

    Containment at level ``k`` is monotone in ``k``, so the answer is found by
    bisection on the level with a closed-form test per level.
    """
    if iv.low < 0 or iv.high > 1:
        raise ValueError(f"{iv!r} is not inside [0, 1)")
    lo_n, lo_d = iv.low.numerator, iv.low.denominator
    hi_n, hi_d = iv.high.numerator, iv.high.denominator

    def index_at(k):
        j = (lo_n << k) // lo_d
        # hi <= (j + 1) / 2^k
        return j if hi_n << k <= (j + 1) * hi_d else None

    lo, hi = 0, pow2_step_at_most(iv.width)  # 2^-hi <= width bounds any cover
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if index_at(mid) is None:
            hi = mid - 1
        else:
            lo = mid
    return DyadicInterval(lo, index_at(lo))


def midpoint(d: DyadicInterval) -> Fraction:
    return Fraction(2 * d.index + 1, 1 << (d.level + 1))
