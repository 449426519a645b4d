"""Prime sieve and exact factorization helpers.

Everything downstream factors naturals below 2**63 whose prime factors
come from a cached sieve.  The cache starts with the first 10**4 primes
(so everything up to 104729) and grows on demand up to EXTEND_LIMIT;
factors beyond that are a hard error rather than a silent wrong answer,
because exponent vectors are indexed by *prime index* and the index of
an arbitrary 63-bit prime is not computable here.
"""

from math import isqrt

import numpy as np

INITIAL_COUNT = 10_000
EXTEND_LIMIT = 10_000_000

_MAX_NAT = (1 << 63) - 1

# deterministic Miller-Rabin witness set for n < 2**64
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _sieve_upto(limit: int) -> np.ndarray:
    """All primes <= limit, ascending, as int64."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def _nth_prime_bound(n: int) -> int:
    # Rosser-style upper bound, generous for small n
    if n < 6:
        return 15
    ln = float(np.log(n))
    return int(n * (ln + np.log(ln)) * 1.2) + 10


_primes = _sieve_upto(_nth_prime_bound(INITIAL_COUNT))[:INITIAL_COUNT]
_index_of = {int(p): i + 1 for i, p in enumerate(_primes)}


def _extend_through_value(x: int) -> None:
    """Grow the cache so it contains every prime <= x."""
    global _primes, _index_of
    if x <= int(_primes[-1]):
        return
    if x > EXTEND_LIMIT:
        raise ValueError(
            f"prime bound {x} exceeds the supported sieve range {EXTEND_LIMIT}"
        )
    _primes = _sieve_upto(x)
    _index_of = {int(p): i + 1 for i, p in enumerate(_primes)}


def prime(i: int) -> int:
    """The i-th prime, 1-based: prime(1) = 2."""
    if i < 1:
        raise ValueError(f"prime index must be >= 1, got {i}")
    while i > len(_primes):
        _extend_through_value(min(2 * int(_primes[-1]), EXTEND_LIMIT))
        if int(_primes[-1]) >= EXTEND_LIMIT and i > len(_primes):
            raise ValueError(f"prime index {i} exceeds the supported sieve range")
    return int(_primes[i - 1])


def prime_index(p: int) -> int:
    """1-based index of the prime p (inverse of prime())."""
    if p in _index_of:
        return _index_of[p]
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    _extend_through_value(p)
    return _index_of[p]


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2**64."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(m: int) -> list[tuple[int, int]]:
    """Factor m into [(prime_index, exponent), ...], indices ascending.

    Raises for m outside [1, 2**63) and for prime factors beyond the
    supported sieve range.
    """
    if not 1 <= m <= _MAX_NAT:
        raise ValueError(f"natural out of range [1, 2**63): {m}")
    out = []
    rest = m
    for i, p in enumerate(_primes):
        p = int(p)
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            out.append((i + 1, e))
    if rest > 1:
        if not is_prime(rest):
            # residual composite: both factors exceed the base sieve
            root = isqrt(rest)
            if root > EXTEND_LIMIT:
                raise ValueError(
                    f"cannot factor residual {rest}: prime factors exceed "
                    f"the supported sieve range {EXTEND_LIMIT}"
                )
            _extend_through_value(root)
            return factorize(m)
        out.append((prime_index(rest), 1))
        out.sort()
    return out
