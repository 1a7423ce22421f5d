"""Reproducible splittable random streams.

Streams are keyed by (seed, stream_id) and backed by the counter-based
Philox bit generator, so distinct stream_ids from one seed give
statistically independent sequences and the same key reproduces the
same draws on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngStream"]


@dataclass
class RngStream:
    """A named, reproducible random stream.

    The underlying generator is created lazily from the (seed, stream_id)
    key and advances as draws are made; two streams with the same key and
    the same call sequence produce bit-identical outputs.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(
        default=None, repr=False, compare=False
    )

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = [np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF),
                   np.uint64(self.stream_id & 0xFFFFFFFFFFFFFFFF)]
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def split(self, stream_id: int) -> "RngStream":
        """Fresh independent stream under the same seed."""
        return RngStream(seed=self.seed, stream_id=stream_id)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def standard_exponential(self, size=None):
        return self.generator.standard_exponential(size)

    def beta(self, a, b, size=None):
        return self.generator.beta(a, b, size)
