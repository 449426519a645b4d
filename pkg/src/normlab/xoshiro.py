"""xoshiro256** bit stream seeded through splitmix64.

The sampler consumes the top bit of each 64-bit output.  A pure-Python
reference implementation defines the stream; a compiled kernel (numba,
optional) produces identical output fast, and the test suite pins a
golden 1024-bit prefix so the stream can never drift silently.
"""

import numpy as np

_MASK = (1 << 64) - 1

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def splitmix64_next(state: int):
    """One splitmix64 step: (new state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def seed_state(seed: int):
    """xoshiro256 state words from a 64-bit seed."""
    s = seed & _MASK
    out = []
    for _ in range(4):
        s, v = splitmix64_next(s)
        out.append(v)
    return tuple(out)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def bits_reference(seed: int, n: int) -> np.ndarray:
    """Top bits of the first n outputs, pure Python."""
    s0, s1, s2, s3 = seed_state(seed)
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        out[i] = (_rotl((s1 * 5) & _MASK, 7) * 9 & _MASK) >> 63
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
    return out


if _HAVE_NUMBA:

    @njit(cache=True)
    def _bits_kernel(s0, s1, s2, s3, out):  # pragma: no cover - compiled
        for i in range(out.shape[0]):
            r = ((s1 * np.uint64(5)) << np.uint64(7)) | (
                (s1 * np.uint64(5)) >> np.uint64(57)
            )
            out[i] = np.uint8((r * np.uint64(9)) >> np.uint64(63))
            t = s1 << np.uint64(17)
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
        return out


def bits(seed: int, n: int) -> np.ndarray:
    """Top bits of the first n outputs (compiled when available)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not _HAVE_NUMBA or n < 4096:
        return bits_reference(seed, n)
    s0, s1, s2, s3 = (np.uint64(v) for v in seed_state(seed))
    out = np.empty(n, dtype=np.uint8)
    _bits_kernel(s0, s1, s2, s3, out)
    return out
