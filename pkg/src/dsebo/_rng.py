"""Named random streams.

Every source of randomness in a run draws from its own PCG64 generator,
derived from ``SeedSequence(seed, spawn_key=(stream_id, *extra))``.  Adding
draws to one stream therefore never shifts another (e.g. changing the budget
never changes the embedding matrix).
"""

import numpy as np

_STREAMS = {
    "embedding": 0,
    "init": 1,
    "acquisition": 2,
    "gp": 3,
    "random_search": 4,
    "bandit": 5,
    "arm": 6,
}


def stream(seed, name, *extra):
    """Return a fresh ``numpy.random.Generator`` for the named stream."""
    key = (_STREAMS[name],) + tuple(int(e) for e in extra)
    ss = np.random.SeedSequence(int(seed) % 2**64, spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))
