"""Counter-based, splittable random streams.

Every sampler takes an explicit :class:`numpy.random.Generator`. Streams are
built on Philox (a counter-based generator) and keyed through
:class:`numpy.random.SeedSequence`, so replication ``i`` of a run seeded with
``seed`` always sees the same stream no matter how replications are
distributed over worker processes.
"""
from __future__ import annotations

import numpy as np


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """Return the stream addressed by ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def split(seed: int, index: int) -> np.random.Generator:
    """Stream for replication ``index`` of a run seeded with ``seed``."""
    return make_stream(seed, index)


def spawn(rng: np.random.Generator, n: int) -> list[np.random.Generator]:
    """Split ``n`` independent child streams off an existing generator."""
    return [np.random.Generator(np.random.Philox(s))
            for s in rng.bit_generator.seed_seq.spawn(n)]
