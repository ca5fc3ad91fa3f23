"""Counter-based random numbers for reproducible, order-independent disorder draws.

Every value is a pure function of ``(seed, realization, stream, position)``, so
any subset of realizations can be generated in any order, on any number of
threads, with bit-identical results. The generator is Philox4x32-10 evaluated
with numpy integer arithmetic over whole arrays of counters.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_LO = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)

FIELD_STREAM = 0
COUPLER_STREAM = 1
CELL_STREAM = 2
GAUGE_STREAM = 3


def philox4x32(counter, key, rounds: int = 10):
    """Philox4x32 block function.

    ``counter`` is a 4-tuple of broadcastable uint32-valued arrays and ``key`` a
    pair of ints. Returns four uint64 arrays holding 32-bit outputs.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) for c in counter)
    k0 = np.uint64(int(key[0]) & 0xFFFFFFFF)
    k1 = np.uint64(int(key[1]) & 0xFFFFFFFF)
    for _ in range(rounds):
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (p1 >> _SHIFT) ^ c1 ^ k0, p1 & _LO, (p0 >> _SHIFT) ^ c3 ^ k1, p0 & _LO
        k0 = (k0 + _W0) & _LO
        k1 = (k1 + _W1) & _LO
    return c0, c1, c2, c3


def _key(seed: int):
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF


def uniforms(seed: int, indices, width: int, stream: int = 0) -> np.ndarray:
    """Open-interval uniforms of shape ``(len(indices), width)``.

    Row ``r`` depends only on ``(seed, indices[r], stream)``; each double takes
    53 bits from two 32-bit Philox words.
    """
    idx = np.asarray(indices, dtype=np.uint64).reshape(-1)
    blocks = (width + 1) // 2
    j = np.arange(blocks, dtype=np.uint64)
    c0 = (idx & _LO)[:, None]
    c1 = (idx >> _SHIFT)[:, None]
    c2 = np.uint64(stream)
    w0, w1, w2, w3 = philox4x32((c0, c1, c2, j[None, :]), _key(seed))
    a = np.stack([w0, w2], axis=-1) >> np.uint64(5)
    b = np.stack([w1, w3], axis=-1) >> np.uint64(6)
    mant = (a * np.uint64(67108864) + b).astype(np.float64)
    u = (mant + 0.5) * (1.0 / 9007199254740992.0)
    return u.reshape(idx.size, 2 * blocks)[:, :width]


def standard_normals(seed: int, indices, width: int, stream: int = 0) -> np.ndarray:
    """Standard normal deviates by inverse-CDF transform of :func:`uniforms`."""
    return ndtri(uniforms(seed, indices, width, stream))


def random_signs(seed: int, indices, width: int, stream: int = 0) -> np.ndarray:
    """Equiprobable +1/-1 values."""
    return np.where(uniforms(seed, indices, width, stream) < 0.5, -1.0, 1.0)
