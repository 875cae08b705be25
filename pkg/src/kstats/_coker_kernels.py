"""Compiled simulation engines (numba).

Per-sample streams make the output independent of scheduling: sample i is
fully determined by (seed, i), so prange partitioning never changes results.

The F_3 engine keeps each row as two 64-column bitplanes (encoding
0=(0,0), 1=(1,0), 2=(0,1)) so one word-op processes 64 entries.  Over F_3,
row -= pivot is row += 2*pivot and 2*x just swaps the planes, so both
elimination cases are a single plane-wise addition.
"""

import numpy as np
from numba import njit, prange

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_FULL = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _fill_planes(LO, HI, m, W, n, state):
    for i in range(m):
        for w in range(W):
            lo = np.uint64(0)
            hi = np.uint64(0)
            need = _FULL
            if w == W - 1 and n & 63:
                need = (np.uint64(1) << np.uint64(n & 63)) - np.uint64(1)
            while need:
                state = state + GOLDEN
                w1 = _mix(state)
                state = state + GOLDEN
                w2 = _mix(state)
                lo |= need & w1 & ~w2
                hi |= need & w2 & ~w1
                need &= w1 & w2
            LO[i, w] = lo
            HI[i, w] = hi


@njit(cache=True)
def _coker_planes(LO, HI, m, W, n):
    rank = 0
    for col in range(n):
        w0 = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        piv = -1
        for i in range(rank, m):
            if ((LO[i, w0] | HI[i, w0]) & bit) != np.uint64(0):
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for w in range(w0, W):
                t = LO[rank, w]; LO[rank, w] = LO[piv, w]; LO[piv, w] = t
                t = HI[rank, w]; HI[rank, w] = HI[piv, w]; HI[piv, w] = t
        if (HI[rank, w0] & bit) != np.uint64(0):
            # pivot entry is 2: scale the row by 2, i.e. swap planes
            for w in range(w0, W):
                t = LO[rank, w]; LO[rank, w] = HI[rank, w]; HI[rank, w] = t
        for i in range(rank + 1, m):
            fl = (LO[i, w0] & bit) != np.uint64(0)
            fh = (HI[i, w0] & bit) != np.uint64(0)
            if fl or fh:
                for w in range(w0, W):
                    al = LO[i, w]; ah = HI[i, w]
                    if fl:  # subtract pivot row = add twice = add swapped planes
                        bl = HI[rank, w]; bh = LO[rank, w]
                    else:   # entry 2: subtract twice = add once
                        bl = LO[rank, w]; bh = HI[rank, w]
                    na = ~(al | ah)
                    nb = ~(bl | bh)
                    LO[i, w] = (na & bl) | (al & nb) | (ah & bh)
                    HI[i, w] = (na & bh) | (ah & nb) | (al & bl)
        rank += 1
        if rank == m:
            break
    return m - rank


@njit(cache=True, parallel=True)
def simulate_p3(u, m, samples, seed):
    res = np.empty(samples, dtype=np.int64)
    n = m + u
    W = (n + 63) >> 6
    for s in prange(samples):
        LO = np.empty((m, W), dtype=np.uint64)
        HI = np.empty((m, W), dtype=np.uint64)
        st = seed + (np.uint64(s) + np.uint64(1)) * GOLDEN
        _fill_planes(LO, HI, m, W, n, st)
        res[s] = _coker_planes(LO, HI, m, W, n)
    return res


@njit(cache=True)
def _coker_generic(A, m, n, p):
    """int64 elimination; pivot rows normalized so entries never overflow."""
    rank = 0
    for col in range(n):
        piv = -1
        for i in range(rank, m):
            if A[i, col] % p != 0:
                piv = i
                break
        if piv < 0:
            continue
        for j in range(col, n):
            t = A[piv, j] % p
            A[piv, j] = A[rank, j]
            A[rank, j] = t
        inv = 1
        av = A[rank, col]
        for t in range(1, p):
            if (av * t) % p == 1:
                inv = t
                break
        if inv != 1:
            for j in range(col, n):
                A[rank, j] = (A[rank, j] * inv) % p
        for i in range(rank + 1, m):
            f = A[i, col] % p
            if f != 0:
                for j in range(col, n):
                    A[i, j] = (A[i, j] + (p - f) * A[rank, j]) % p
        rank += 1
        if rank == m:
            break
    return m - rank


@njit(cache=True, parallel=True)
def simulate_generic(p, u, m, samples, seed):
    res = np.empty(samples, dtype=np.int64)
    n = m + u
    for s in prange(samples):
        A = np.empty((m, n), dtype=np.int64)
        st = seed + (np.uint64(s) + np.uint64(1)) * GOLDEN
        for i in range(m):
            for j in range(n):
                st = st + GOLDEN
                A[i, j] = np.int64(_mix(st) % np.uint64(p))
        res[s] = _coker_generic(A, m, n, p)
    return res
