"""Counter-based random bit streams for reproducible experiments.

The generator is frozen so results are reproducible across versions:

* ``mix64`` is the SplitMix64 finaliser::

      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2^64)
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB  (mod 2^64)
      z =  z ^ (z >> 31)

* stream ``s`` under seed ``S`` has key
  ``K = mix64(S ^ mix64((s + 1) * G))`` with ``G = 0x9E3779B97F4A7C15``;
* its ``i``-th 64-bit word (``i = 0, 1, ...``) is ``mix64(K + (i + 1) * G)``;
* bits are read from each word most significant bit first.

Every Monte Carlo trial uses the stream numbered by its trial index, so the
outcome of a trial does not depend on how trials are scheduled.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class BitStream:
    """Iterator over the bits of stream ``stream`` under ``seed``."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed
        self.stream = stream
        self._key = mix64((seed & MASK64) ^ mix64((stream + 1) * GOLDEN))
        self._counter = 0
        self._word = 0
        self._left = 0

    def word(self, i: int) -> int:
        return mix64(self._key + (i + 1) * GOLDEN)

    def __iter__(self):
        return self

    def __next__(self) -> int:
        if not self._left:
            self._word = self.word(self._counter)
            self._counter += 1
            self._left = 64
        self._left -= 1
        return (self._word >> self._left) & 1
