"""Exact integer and rational primitives shared by every other module.

Everything here is pure integer/Fraction arithmetic: Kronecker symbols,
squarefree sieving, fundamental-discriminant tests, and Bernoulli-number
numerators.  No floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

BERNOULLI_MAX_K = 500
SIEVE_SEGMENT = 1 << 24
SIEVE_BUDGET = 1 << 28


class ResourceLimitError(Exception):
    """A configured resource bound (memory budget, table size) was exceeded."""


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) and a*x + b*y = g."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), fully extended to n <= 0 and n even."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    # factor out twos of n; (a|2) is 0 for even a, +1 for a = +-1 mod 8, else -1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            res = -res
    # Jacobi symbol for odd n >= 1 via quadratic reciprocity
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    i = 2
    while i * i <= n:
        if n % (i * i) == 0:
            return False
        i += 1
    return True


def is_fundamental(d: int) -> bool:
    """True iff d is the discriminant of a quadratic field (d != 0, 1)."""
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminant(m: int) -> int:
    """Discriminant of Q(sqrt(m)) for any nonsquare integer m != 0."""
    if m == 0:
        raise ValueError("m must be nonzero")
    sq = 1
    n = abs(m)
    i = 2
    while i * i <= n:
        while n % (i * i) == 0:
            n //= i * i
            sq *= i
        i += 1
    m0 = m // (sq * sq)
    if m0 == 1:
        raise ValueError("m is a perfect square")
    return m0 if m0 % 4 == 1 else 4 * m0


def coset3(d: int) -> int:
    """3-adic square-class label of a fundamental discriminant.

    Returns 1, 2, 3 or 6: residue of d mod 3 when 3 does not divide d,
    else residue mod 9 (necessarily 3 or 6).  d lies in Q_3^x2 exactly
    when the label is 1.
    """
    r = d % 3
    if r:
        return r
    r9 = d % 9
    if r9 not in (3, 6):
        raise ValueError(f"{d} is not a fundamental discriminant")
    return r9


def p_star(p: int) -> int:
    """The signed prime (-1)^((p-1)/2) * p, discriminant of the quadratic subfield of Q(zeta_p)."""
    return p if p % 4 == 1 else -p


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


def squarefree_sieve(lo: int, hi: int, segment: int = SIEVE_SEGMENT) -> np.ndarray:
    """Boolean array over [lo, hi]: entry i is True iff |lo + i| is squarefree.

    Sieves by squares of primes up to sqrt(hi) in segments of the given
    length, so memory stays bounded for large ranges.
    """
    if lo > hi:
        raise ValueError("lo > hi")
    length = hi - lo + 1
    if length > SIEVE_BUDGET:
        raise ResourceLimitError(f"sieve range {length} exceeds budget {SIEVE_BUDGET}")
    out = np.ones(length, dtype=bool)
    bound = max(abs(lo), abs(hi))
    primes = _primes_upto(math.isqrt(bound))
    for seg_lo in range(lo, hi + 1, segment):
        seg_hi = min(seg_lo + segment - 1, hi)
        view = out[seg_lo - lo:seg_hi - lo + 1]
        for p in primes:
            q = p * p
            # first multiple of q that is >= seg_lo
            start = -(-seg_lo // q) * q
            if start <= seg_hi:
                view[start - seg_lo::q] = False
    # 0 is not squarefree
    if lo <= 0 <= hi:
        out[-lo] = False
    return out


@lru_cache(maxsize=None)
def _primes_upto(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return tuple(int(p) for p in np.nonzero(sieve)[0])


def primes_upto(n: int) -> tuple[int, ...]:
    """Primes <= n, ascending."""
    return _primes_upto(n)


@lru_cache(maxsize=None)
def bernoulli_b2k(k: int, max_k: int = BERNOULLI_MAX_K) -> Fraction:
    """B_{2k} as an exact Fraction, via the Akiyama-Tanigawa tableau."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > max_k:
        raise ResourceLimitError(f"k={k} exceeds Bernoulli bound {max_k}")
    n = 2 * k
    row = [Fraction(1, m + 1) for m in range(n + 1)]
    for m in range(1, n + 1):
        for j in range(n + 1 - m):
            row[j] = (j + 1) * (row[j] - row[j + 1])
    # tableau yields B_n with the B_1 = +1/2 convention; even indices agree either way
    return row[0]


def bernoulli_c(k: int, max_k: int = BERNOULLI_MAX_K) -> int:
    """Numerator of |B_{2k}/(4k)| in lowest terms."""
    if k < 1:
        raise ValueError("k must be >= 1")
    val = abs(bernoulli_b2k(k, max_k)) / (4 * k)
    return val.numerator
