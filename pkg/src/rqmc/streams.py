"""Reproducible, splittable random streams.

Contract (fixed so other implementations can match bit-for-bit): stream
``t`` of master seed ``S`` is the Philox4x64 counter-based generator with
key ``(S mod 2**64, t mod 2**64)`` and counter starting at zero. Distinct
``(S, t)`` pairs give statistically independent streams, and a stream never
depends on how many sibling streams exist.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator number `index` of the family keyed by `master_seed`."""
    key = np.array([master_seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def substreams(master_seed: int, start: int, count: int) -> list[np.random.Generator]:
    return [substream(master_seed, start + i) for i in range(count)]
