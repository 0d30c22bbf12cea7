"""Seeded random streams.

Every stochastic choice in a world draws from one ``Stream``: a PCG64
(XSL-RR 128/64) bit generator read in blocks. Raw 64-bit outputs are turned
into doubles with the top 53 bits, so the float sequence depends only on the
PCG64 bit stream, which numpy keeps stable across releases.

Child seeds come from SplitMix64 mixing, so ``derive_seed(seed, i)`` is a
pure function of its integer arguments.
"""

from __future__ import annotations

from functools import partial
from itertools import chain
from operator import length_hint

import numpy as np

MASK64 = (1 << 64) - 1
_BLOCK = 4096
_TO_UNIT = 2.0**-53


def splitmix64(x: int) -> int:
    """One SplitMix64 output for state ``x`` (Steele, Lea & Flood constants)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    """Fold integer ``parts`` into ``seed``; returns a 64-bit seed."""
    h = splitmix64(seed & MASK64)
    for part in parts:
        h = splitmix64(h ^ (part & MASK64))
    return h


class Stream:
    """Buffered PCG64 stream of uniform doubles in [0, 1).

    ``random`` is a C-level ``next`` over blocks of converted outputs; the
    stream position is recoverable, so copies resume where the original is.
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._bitgen = np.random.PCG64(self.seed)
        self._blocks = 0
        self._cur = iter(())
        self.random = partial(next, chain.from_iterable(self._generate()))

    def _generate(self):
        while True:
            raw = self._bitgen.random_raw(_BLOCK)
            self._blocks += 1
            self._cur = iter(((raw >> np.uint64(11)).astype(np.float64) * _TO_UNIT).tolist())
            yield self._cur

    @property
    def position(self) -> int:
        """Number of doubles drawn so far."""
        return self._blocks * _BLOCK - length_hint(self._cur)

    def __deepcopy__(self, memo):
        twin = Stream(self.seed)
        for _ in range(self.position):
            twin.random()
        memo[id(self)] = twin
        return twin

    def below(self, n: int) -> int:
        """Integer in [0, n) by scaling one double; n must be positive."""
        return int(self.random() * n)

    def below_many(self, n: int, k: int) -> list[int]:
        rand = self.random
        return [int(rand() * n) for _ in range(k)]

    def choice(self, seq):
        return seq[int(self.random() * len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, last index first."""
        rand = self.random
        for i in range(len(items) - 1, 0, -1):
            j = int(rand() * (i + 1))
            items[i], items[j] = items[j], items[i]

    def uniform_vector(self, n: int) -> list[float]:
        rand = self.random
        return [rand() for _ in range(n)]
