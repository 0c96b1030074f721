"""
Deterministic random substreams and block-parallel accumulation.

A Monte Carlo budget is cut into fixed-size blocks.  Block ``i`` of a given
``purpose`` always draws from the same substream, so results do not depend
on how many workers evaluate the blocks; partial sums are merged in block
order.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = ["substream", "block_counts", "map_blocks", "sphere_directions", "PURPOSE"]

# distinct spawn keys per consumer so engines never share draws by accident
PURPOSE = {
    "tail": 1,
    "directional": 2,
    "mollifier": 3,
    "energy": 4,
    "probe": 5,
    "single-direction": 6,
    "check": 7,
}


def substream(seed, purpose, block=0):
    """``numpy.random.Generator`` for (seed, purpose, block)."""
    code = PURPOSE[purpose] if isinstance(purpose, str) else int(purpose)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(code, int(block)))
    return np.random.Generator(np.random.PCG64(ss))


def block_counts(total, block_size):
    total = int(total)
    block_size = int(block_size)
    nfull, rem = divmod(total, block_size)
    counts = [block_size] * nfull
    if rem:
        counts.append(rem)
    return counts


def map_blocks(fn, counts, workers=1):
    """Apply ``fn(block_index, count)`` to every block; results in block order."""
    jobs = list(enumerate(counts))
    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [fn(i, c) for i, c in jobs]
    with ThreadPoolExecutor(max_workers=int(workers)) as ex:
        return list(ex.map(lambda ic: fn(*ic), jobs))


def sphere_directions(rng, n, dim):
    """Uniform unit vectors on S^{dim-1}; for dim 1 a fair choice of +-1."""
    if dim == 1:
        return np.where(rng.random((n, 1)) < 0.5, -1.0, 1.0)
    if dim == 2:
        th = 2.0 * math.pi * rng.random(n)
        return np.column_stack([np.cos(th), np.sin(th)])
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
