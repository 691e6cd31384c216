"""Adjacent points, adjacent delta-sets and the two delay oracles.

For an anchor ``p`` inside a frame ``[a, b)``, the left-adjacent subtracts
the largest power of two that keeps the point at or above ``a`` and the
right-adjacent adds the largest power of two that keeps it strictly below
``b``. Iterating gives two monotone sequences converging to the edges.

With the frame equal to the source interval ``I(x^n)`` and ``p`` the midpoint
of the emitted-bits interval, ``x^n`` is fully decoded after an extension
exactly when no iterated adjacent lies strictly inside ``I(x^{n+d})``.
:func:`s0_blocking_point` implements that test and
:func:`delay_of_extension` the direct covering test; they must agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coder import source_interval
from .exact import (
    RationalInterval,
    as_fraction,
    midpoint,
    minimal_covering_dyadic,
    pow2_step_at_most,
    pow2_step_below,
)

__all__ = [
    "AdjacentSet",
    "DelayVerdict",
    "DelaySample",
    "left_adjacent",
    "right_adjacent",
    "left_adjacents",
    "right_adjacents",
    "adjacent_delta_set",
    "lemma1_bound",
    "s0_blocking_point",
    "decoded_by_covering",
    "decoded_by_s0",
    "s0_verdict",
    "delay_of_extension",
]


def left_adjacent(p, a) -> Fraction:
    p, a = as_fraction(p), as_fraction(a)
    if p <= a:
        raise ValueError(f"no left-adjacent: p={p} is not above a={a}")
    k = max(1, pow2_step_at_most(p - a))
    return p - Fraction(1, 1 << k)


def right_adjacent(p, b) -> Fraction:
    p, b = as_fraction(p), as_fraction(b)
    if p >= b:
        raise ValueError(f"no right-adjacent: p={p} is not below b={b}")
    k = max(1, pow2_step_below(b - p))
    return p + Fraction(1, 1 << k)


def left_adjacents(p, a, stop):
    """Iterated left-adjacents of ``p`` (excluding ``p``) that are ``>= stop``."""
    p, a = as_fraction(p), as_fraction(a)
    while p > a:
        p = left_adjacent(p, a)
        if p < stop:
            return
        yield p


def right_adjacents(p, b, stop):
    """Iterated right-adjacents of ``p`` (excluding ``p``) that are ``< stop``."""
    p, b = as_fraction(p), as_fraction(b)
    while True:
        p = right_adjacent(p, b)
        if p >= stop:
            return
        yield p


@dataclass(frozen=True)
class AdjacentSet:
    anchor: Fraction
    frame: RationalInterval
    delta: Fraction
    points: tuple

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def adjacent_delta_set(p, frame: RationalInterval, delta) -> AdjacentSet:
    """All iterated adjacents of ``p`` (and ``p``) in ``[a + delta, b - delta)``."""
    p, delta = as_fraction(p), as_fraction(delta)
    a, b = frame.low, frame.high
    if delta <= 0:
        raise ValueError("delta must be positive; the delta = 0 set is infinite")
    if not a <= p < b:
        raise ValueError(f"anchor {p} outside frame {frame!r}")
    lo, hi = a + delta, b - delta
    # both sequences are monotone, so the generators stop at the first point
    # past the clipped range
    left = list(left_adjacents(p, a, lo))
    right = list(right_adjacents(p, b, hi))
    mid = [p] if lo <= p < hi else []
    points = [x for x in reversed(left) if x < hi] + mid + [x for x in right if x >= lo]
    return AdjacentSet(p, frame, delta, tuple(points))


def lemma1_bound(width, delta) -> float:
    """``1 + 2 log2(width / delta)``, the size bound on an adjacent delta-set."""
    width, delta = as_fraction(width), as_fraction(delta)
    if not 0 < delta < width:
        raise ValueError("need 0 < delta < width")
    ratio = width / delta
    return 1 + 2 * (math.log2(ratio.numerator) - math.log2(ratio.denominator))


def s0_blocking_point(p, frame: RationalInterval, ext: RationalInterval):
    """A point of the full adjacent set of ``p`` strictly inside ``ext``, or None.

    Only one candidate per side needs testing: on the side of ``p`` where
    ``ext`` lies, the first adjacent that crosses the near edge of ``ext``.
    Right-adjacents stop blocking once the gap to ``b`` is a power of two,
    since from then on their dyadic intervals fit inside the frame.
    """
    p = as_fraction(p)
    a, b = frame.low, frame.high
    if not a <= p < b:
        raise ValueError(f"anchor {p} outside frame {frame!r}")
    if not frame.contains_interval(ext):
        raise ValueError(f"{ext!r} is not inside frame {frame!r}")
    lo, hi = ext.low, ext.high
    if lo < p < hi:
        return p
    if hi <= p:
        x = p
        while x > a:
            x = left_adjacent(x, a)
            if x < hi:
                return x if x > lo else None
        return None
    x = p
    while True:
        gap = b - x
        if gap.numerator == 1 and gap.denominator & (gap.denominator - 1) == 0:
            # every later adjacent splits a dyadic interval ending exactly at b
            return None
        x = right_adjacent(x, b)
        if x > lo:
            return x if x < hi else None


@dataclass(frozen=True)
class DelayVerdict:
    decoded: bool
    witness: Fraction | None = None

    def __post_init__(self):
        if not self.decoded and self.witness is None:
            raise ValueError("an undecoded verdict needs a witness")


@dataclass(frozen=True)
class DelaySample:
    """Delay of one prefix: ``delay`` letters, or censored after ``horizon``."""

    delay: int | None
    horizon: int

    @property
    def censored(self) -> bool:
        return self.delay is None


def decoded_by_covering(frame: RationalInterval, ext: RationalInterval) -> bool:
    cover = minimal_covering_dyadic(ext)
    return frame.low <= cover.low and cover.high <= frame.high


def s0_verdict(frame: RationalInterval, ext: RationalInterval) -> DelayVerdict:
    """Decodability of ``frame`` once the source interval has shrunk to ``ext``.

    The anchor is the midpoint of the minimal covering dyadic interval of the
    frame. A dyadic frame is its own covering and is decoded immediately.
    """
    cover = minimal_covering_dyadic(frame)
    if cover.low == frame.low and cover.high == frame.high:
        return DelayVerdict(True)
    w = s0_blocking_point(midpoint(cover), frame, ext)
    return DelayVerdict(w is None, w)


def decoded_by_s0(frame: RationalInterval, ext: RationalInterval) -> bool:
    return s0_verdict(frame, ext).decoded


def delay_of_extension(source, prefix: Sequence[int], extension: Sequence[int]) -> DelaySample:
    """Smallest ``d`` such that the covering of ``I(x^{n+d})`` lies in ``I(x^n)``."""
    prefix, extension = list(prefix), list(extension)
    frame = source_interval(source, prefix)
    for d in range(len(extension) + 1):
        ext = source_interval(source, prefix + extension[:d])
        if decoded_by_covering(frame, ext):
            return DelaySample(d, len(extension))
    return DelaySample(None, len(extension))
