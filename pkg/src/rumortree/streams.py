"""Counter-based random streams, one per (seed, replica index).

Each replica owns the Philox stream whose 128-bit key is
``seed * 2**64 + replica_index``, so its draws do not depend on which worker
runs it or in what order.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def replica_key(seed: int, index: int) -> int:
    return ((seed & MASK64) << 64) | (index & MASK64)


def replica_stream(seed: int, index: int) -> np.random.Generator:
    """A fresh generator for one replica."""
    return np.random.Generator(np.random.Philox(key=replica_key(seed, index)))


class StreamFactory:
    """Re-keys a single Philox generator per replica.

    Produces exactly the streams of :func:`replica_stream` at a fraction of the
    construction cost.  The generator returned by :meth:`stream` is shared and
    is invalidated by the next call.
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._bitgen = np.random.Philox(key=0)
        self.generator = np.random.Generator(self._bitgen)
        self._zeros = np.zeros(4, dtype=np.uint64)

    def stream(self, index: int) -> np.random.Generator:
        self._bitgen.state = {
            "bit_generator": "Philox",
            "state": {"counter": self._zeros.copy(),
                      "key": np.array([index & MASK64, self.seed], dtype=np.uint64)},
            "buffer": self._zeros.copy(),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self.generator
