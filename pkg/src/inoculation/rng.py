"""Counter-based sampling streams.

Sample ``k`` under seed ``s`` reads Philox4x64 (numpy's implementation, key
``s``) starting at counter ``k * ceil(width / 4)``. A block of samples
``[start, start + count)`` is therefore bit-identical no matter how the full
sample range is split into blocks or spread over workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK = 8192
_SCALE = 2.0 ** -53


def uniform_block(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """``count x width`` uniforms in [0, 1) for samples ``start..start+count-1``."""
    per = -(-width // 4)
    bitgen = np.random.Philox(key=int(seed), counter=int(start) * per)
    raw = bitgen.random_raw(count * per * 4).reshape(count, per * 4)[:, :width]
    return (raw >> np.uint64(11)).astype(np.float64) * _SCALE


def block_ranges(samples: int, block: int = BLOCK):
    return [(s, min(block, samples - s)) for s in range(0, samples, block)]


def map_blocks(fn, samples: int, workers: int = 1, block: int = BLOCK) -> list:
    """Apply ``fn(start, count)`` to each block; results come back in block order."""
    ranges = block_ranges(samples, block)
    if workers <= 1 or len(ranges) == 1:
        return [fn(s, c) for s, c in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: fn(*r), ranges))


def block_moments(x: np.ndarray):
    """(count, mean, sum of squared deviations) of one block of samples."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return 0, 0.0, 0.0
    mu = float(x.mean())
    return x.size, mu, float(((x - mu) ** 2).sum())


def combine_moments(parts):
    """Merge per-block moments in order (Chan et al. pairwise update)."""
    n, mu, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        if nb == 0:
            continue
        tot = n + nb
        d = mb - mu
        mu += d * nb / tot
        m2 += m2b + d * d * n * nb / tot
        n = tot
    return n, mu, m2


def mean_halfwidth(parts, z: float = 1.96):
    """Mean and normal-approximation 95% half-width from per-block moments."""
    n, mu, m2 = combine_moments(parts)
    if n < 2:
        return mu, float("inf")
    var = m2 / (n - 1)
    return mu, z * (var / n) ** 0.5
