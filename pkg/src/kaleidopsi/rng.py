"""Injectable randomness sources.

Everything that draws randomness (share splitting, m-splitting, workload
sampling, seed generation) takes a RandomSource so tests can force exact
values and the CLI can derive everything from one master seed.
"""

from __future__ import annotations

import secrets
import random
import zlib

from .errors import ParameterError


class RandomSource:
    """Interface: a uniform draw below a bound."""

    def randbelow(self, bound: int) -> int:
        raise NotImplementedError


class SecureRandomSource(RandomSource):
    """Cryptographically secure source; the production default."""

    def randbelow(self, bound: int) -> int:
        return secrets.randbelow(bound)


class SeededRandomSource(RandomSource):
    """Deterministic source for reproducible runs (--seed)."""

    def __init__(self, seed: int):
        self._rng = random.Random(seed)

    def randbelow(self, bound: int) -> int:
        return self._rng.randrange(bound)

    def spawn(self, tag: str) -> "SeededRandomSource":
        """Independent child stream, stable in `tag`."""
        return SeededRandomSource(self._rng.getrandbits(64) ^ zlib.crc32(tag.encode()))


class SequenceRandomSource(RandomSource):
    """Replays a fixed sequence of draws; test-only."""

    def __init__(self, values):
        self._values = list(values)
        if not self._values:
            raise ParameterError("forced random sequence must be non-empty")
        self._i = 0

    def randbelow(self, bound: int) -> int:
        if self._i >= len(self._values):
            raise ParameterError("forced random sequence exhausted")
        v = self._values[self._i]
        self._i += 1
        if not 0 <= v < bound:
            raise ParameterError(f"forced value {v} out of range [0, {bound})")
        return v
