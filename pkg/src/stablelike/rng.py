"""Counter-based random streams for reproducible parallel sampling.

Every stochastic routine in the package draws from a Philox generator
keyed by (seed, path index, channel).  Philox streams with distinct keys
are statistically independent and the draw sequence depends only on the
key, never on which worker created the generator, so ensembles are
bitwise reproducible at any parallelism degree.
"""

import numpy as np

# Channel ids.  Fixed numbers, never reordered: the stream layout is part
# of the reproducibility contract.
CH_INCREMENTS = 0
CH_JUMP_TIMES = 1
CH_JUMP_MARKS = 2
CH_THINNING = 3

_MIX = np.uint64(0x9E3779B97F4A7C15)


def stream(seed, path=0, channel=0):
    """Independent ``numpy.random.Generator`` keyed by (seed, path, channel)."""
    with np.errstate(over="ignore"):
        word0 = np.uint64(seed) ^ (np.uint64(path) * _MIX)
    key = (word0, np.uint64(channel))
    return np.random.Generator(np.random.Philox(key=key))
