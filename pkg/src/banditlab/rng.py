"""Seeded, portable random-number streams.

Streams are keyed by a 64-bit ``(seed, stream_id)`` pair fed to a
counter-based Philox generator, which produces identical sequences on every
platform. Child streams derived from a stream are independent of each other
and of the parent, so per-arm sampling can be decoupled from pull order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible stream of randomness.

    Identical ``(seed, stream_id)`` pairs yield identical sample sequences
    across platforms and runs.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(seq))

    def child(self, *indices: int) -> np.random.Generator:
        """Return a generator for an independent child stream.

        Children with distinct index tuples are mutually independent and
        independent of :meth:`generator`.
        """
        seq = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id, *indices)
        )
        return np.random.Generator(np.random.Philox(seq))
