"""Counter-based sign generator.

Every random bit is a pure function of ``(seed, stream, prime_index)``: no
state is carried between draws, so samples can be produced in any order and
by any number of workers with identical results.

The 64-bit word for block ``b`` of stream ``s`` is::

    k0   = mix64(seed + G)
    k1   = mix64(k0 + (s + 1) * G)
    word = mix64(k1 + (b + 1) * G)

with arithmetic mod 2^64, G = 0x9E3779B97F4A7C15 and ``mix64`` the
SplitMix64 output function. The sign at prime index ``i`` is -1 iff bit
``i % 64`` of the word for block ``i // 64`` is set.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def mix64_int(x: int) -> int:
    """Scalar reference version of :func:`mix64`."""
    x &= _MASK
    x ^= x >> 30
    x = (x * _M1) & _MASK
    x ^= x >> 27
    x = (x * _M2) & _MASK
    x ^= x >> 31
    return x


def mix64(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_M1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_M2)
    return x ^ (x >> np.uint64(31))


def word_int(seed: int, stream: int, block: int) -> int:
    k0 = mix64_int(seed + GOLDEN)
    k1 = mix64_int(k0 + (stream + 1) * GOLDEN)
    return mix64_int(k1 + (block + 1) * GOLDEN)


def sign_words(seed: int, streams: np.ndarray, blocks: int) -> np.ndarray:
    """``(len(streams), blocks)`` uint64 words for the given stream ids."""
    k0 = mix64_int(seed + GOLDEN)
    s = np.asarray(streams, dtype=np.uint64)
    k1 = mix64(np.uint64(k0) + (s + np.uint64(1)) * np.uint64(GOLDEN))
    b = (np.arange(blocks, dtype=np.uint64) + np.uint64(1)) * np.uint64(GOLDEN)
    return mix64(k1[:, None] + b[None, :])


def negative_flags(seed: int, streams: np.ndarray, k: int) -> np.ndarray:
    """Boolean ``(len(streams), k)``: True where prime index i draws -1."""
    blocks = max(1, -(-k // 64))
    words = sign_words(seed, streams, blocks)
    bits = np.unpackbits(words.astype("<u8").view(np.uint8), axis=1, bitorder="little")
    return bits[:, :k].astype(bool)


def truncate_words(words: np.ndarray, k: int) -> np.ndarray:
    """Zero every bit at index >= k (bit i of the flattened little-endian words)."""
    out = words.copy()
    full, rem = divmod(k, 64)
    if full < out.shape[1]:
        if rem:
            out[:, full] &= np.uint64((1 << rem) - 1)
            full += 1
        out[:, full:] = 0
    return out
