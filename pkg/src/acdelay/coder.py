"""Sequential Elias arithmetic encoder and decoder with exact state.

The encoder keeps the source interval ``I(x^n)`` and emits a bit whenever
the interval fits in one half of the current binary interval ``J(b^k)``.
The decoder keeps ``J(b^k)`` and emits a letter whenever ``J`` fits inside
one letter sub-interval of the current source interval. There is no
end-of-stream symbol; :meth:`Encoder.flush` exists for the CLI only.

Internally both machines use integer numerators over ``scale ** n`` (the
source's common denominator raised to the sequence length), which keeps
every comparison exact without Fraction normalisation on each step.
"""
from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import DyadicInterval, RationalInterval

__all__ = [
    "Encoder",
    "Decoder",
    "source_interval",
    "encoder_push",
    "decoder_push",
    "encode",
    "decode",
    "pipeline_decoded_count",
]


def source_interval(source, letters: Sequence[int]) -> RationalInterval:
    """``I(x^n)`` via ``f(x^n) = f(x^{n-1}) + f1(x_n) Pr(x^{n-1})``."""
    low, prob, prev = Fraction(0), Fraction(1), None
    for x in letters:
        source.check_letter(x)
        probs = source.next_probs(prev)
        low += sum(probs[:x], Fraction(0)) * prob
        prob *= probs[x]
        prev = x
    if prob == 0:
        raise ValueError(f"sequence {list(letters)} has probability zero")
    return RationalInterval(low, prob)


class Encoder:
    def __init__(self, source):
        self.source = source
        self._q = source.scale
        self._low = 0
        self._width = 1
        self._den = 1
        self._prev = None
        self.letters_consumed = 0
        self.level = 0
        self.index = 0

    def copy(self) -> "Encoder":
        new = Encoder.__new__(Encoder)
        new.__dict__.update(self.__dict__)
        return new

    @property
    def interval(self) -> RationalInterval:
        return RationalInterval(Fraction(self._low, self._den), Fraction(self._width, self._den))

    @property
    def dyadic(self) -> DyadicInterval:
        return DyadicInterval(self.level, self.index)

    @property
    def bits_emitted(self) -> str:
        return self.dyadic.bits

    @property
    def last_letter(self):
        return self._prev

    @property
    def prob(self) -> Fraction:
        return Fraction(self._width, self._den)

    def push(self, letter: int) -> str:
        """Consume one letter and return the bits it releases."""
        x = self.source.check_letter(letter)
        cum = self.source.cum_table(self._prev)
        c0, c1 = cum[x], cum[x + 1]
        if c0 == c1:
            raise ValueError(f"letter {x} has probability zero here")
        self._low = self._low * self._q + c0 * self._width
        self._width *= c1 - c0
        self._den *= self._q
        self._prev = x
        self.letters_consumed += 1
        return self._emit()

    def _emit(self) -> str:
        out = []
        low, high, den = self._low, self._low + self._width, self._den
        while True:
            # midpoint of J is (2j+1) / 2^(k+1)
            mid_num = (2 * self.index + 1) * den
            shift = self.level + 1
            if high << shift <= mid_num:
                bit = 0
            elif low << shift >= mid_num:
                bit = 1
            else:
                break
            self.level += 1
            self.index = 2 * self.index + bit
            out.append("01"[bit])
        return "".join(out)

    def covered_by(self, iv: RationalInterval) -> bool:
        """Whether the emitted-bits interval lies inside ``iv``."""
        k, j = self.level, self.index
        lo, hi = iv.low, iv.high
        return lo.numerator << k <= j * lo.denominator and \
            (j + 1) * hi.denominator <= hi.numerator << k

    def flush(self) -> str:
        """Bits naming a dyadic interval inside the current source interval.

        Not part of the streaming process; the state is left untouched.
        """
        low, high, den = self._low, self._low + self._width, self._den
        level = self.level
        while True:
            i = -((-low << level) // den)
            if (i + 1) * den <= high << level:
                return format(i, f"0{level}b")[self.level:] if level else ""
            level += 1


class Decoder:
    """Turns a bit stream back into letters as soon as they are determined.

    ``max_letters`` caps the output; it is needed for sources with a
    deterministic cycle, where a single bit can determine infinitely many
    letters.
    """

    def __init__(self, source, max_letters: int | None = None):
        self.source = source
        self.max_letters = max_letters
        self._q = source.scale
        self._low = 0
        self._width = 1
        self._den = 1
        self._prev = None
        self.level = 0
        self.index = 0
        self.letters_emitted: list[int] = []

    @property
    def bits_consumed(self) -> int:
        return self.level

    @property
    def dyadic(self) -> DyadicInterval:
        return DyadicInterval(self.level, self.index)

    @property
    def interval(self) -> RationalInterval:
        return RationalInterval(Fraction(self._low, self._den), Fraction(self._width, self._den))

    def push(self, bit: int) -> list[int]:
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        self.level += 1
        self.index = 2 * self.index + bit
        return self._drain()

    def _drain(self) -> list[int]:
        out = []
        k, j, q = self.level, self.index, self._q
        certain_run = set()
        while self.max_letters is None or len(self.letters_emitted) < self.max_letters:
            cum = self.source.cum_table(self._prev)
            base = self._low * q
            den = self._den * q
            w = self._width
            # J.low = j / 2^k >= (base + cum[y] w) / den  picks the candidate y
            y = bisect_right(cum, ((j * den) - (base << k)) // (w << k)) - 1
            if (j + 1) * den > (base + cum[y + 1] * w) << k:
                break
            c0, c1 = cum[y], cum[y + 1]
            if c1 - c0 == q and self.max_letters is None:
                if self._prev in certain_run:
                    raise ValueError("deterministic cycle: output is unbounded, set max_letters")
                certain_run.add(self._prev)
            else:
                certain_run.clear()
            self._low = base + c0 * w
            self._width = w * (c1 - c0)
            self._den = den
            self._prev = y
            self.letters_emitted.append(y)
            out.append(y)
        return out


def encoder_push(state: Encoder, letter: int) -> str:
    return state.push(letter)


def decoder_push(state: Decoder, bit: int) -> list[int]:
    return state.push(bit)


def encode(source, letters: Iterable[int]) -> str:
    enc = Encoder(source)
    return "".join(enc.push(x) for x in letters)


def decode(source, bits: Iterable, max_letters: int | None = None) -> list[int]:
    dec = Decoder(source, max_letters)
    for b in bits:
        dec.push(int(b))
    return dec.letters_emitted


def pipeline_decoded_count(source, letters: Sequence[int]) -> int:
    """How many letters of ``letters`` the decoder recovers from the streamed bits."""
    letters = list(letters)
    got = decode(source, encode(source, letters), max_letters=len(letters))
    if got != letters[: len(got)]:
        raise RuntimeError(f"decoder produced {got}, not a prefix of {letters}")
    return len(got)
