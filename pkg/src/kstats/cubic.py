"""Cubic fields of bounded discriminant via classes of integral binary cubic forms.

One GL_2(Z)-class of irreducible forms, maximal at every prime, corresponds
to one cubic field with the same discriminant.  Enumeration covers two
reduction domains:

* disc > 0: the Hessian (P, Q, R) = (b^2-3ac, bc-9ad, c^2-3bd) is positive
  definite and we keep forms with |Q| <= P <= R, a > 0.  Loop bounds follow
  from the exact identity 3aR + cP - bQ = 0 together with P <= sqrt(disc).
* disc < 0: the form has one real root theta and a positive definite real
  quadratic factor x^2 + sxy + ty^2; we keep |s| <= 1 <= t, a > 0 (tested
  in floating point with a small slack; duplicates this admits are removed
  by exact canonical keys).

A class's canonical key is the lexicographically smallest in-domain form in
its orbit under unimodular matrices with entries in [-1, 1]; enumerated
candidates are deduplicated on that key.  The whole pipeline is certified
downstream against the class-group oracle, which is what actually pins
down the reduction, the bounds, and the maximality test.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np

from .exact import primes_upto, squarefree_sieve, xgcd
from .quadratic import QuadFamily, coset3_array, fundamental_mask

CACHE_FORMAT_VERSION = 1

SPLIT, INERT, PARTIAL, RAM_PARTIAL, RAM_TOTAL = ("split", "inert", "partial",
                                                 "ramified-partial", "ramified-total")
SPLIT_CODES = (SPLIT, INERT, PARTIAL, RAM_PARTIAL, RAM_TOTAL)

# alpha_3 density table: nowhere-totally-ramified cubic fields with the given
# (sign of d_L, 3-adic coset), with 3 split required in the coset-1 cell;
# count below X is alpha_3 * X / zeta(2) + o(X)
ALPHA3 = {
    (1, 1): Fraction(1, 96), (1, 2): Fraction(1, 32),
    (1, 3): Fraction(1, 96), (1, 6): Fraction(1, 96),
    (-1, 1): Fraction(1, 32), (-1, 2): Fraction(3, 32),
    (-1, 3): Fraction(1, 32), (-1, 6): Fraction(1, 32),
}


class CacheCorruptionError(Exception):
    """A cubic cache file failed validation."""


@dataclass(frozen=True)
class BinaryCubicForm:
    a: int
    b: int
    c: int
    d: int

    def coeffs(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def disc(self) -> int:
        return disc_form(self.a, self.b, self.c, self.d)

    def hessian(self) -> tuple[int, int, int]:
        a, b, c, d = self.coeffs()
        return (b*b - 3*a*c, b*c - 9*a*d, c*c - 3*b*d)

    def transformed(self, M: tuple[int, int, int, int]) -> "BinaryCubicForm":
        return BinaryCubicForm(*transform_coeffs(self.coeffs(), M))

    def __call__(self, x: int, y: int) -> int:
        a, b, c, d = self.coeffs()
        return a*x**3 + b*x*x*y + c*x*y*y + d*y**3


def disc_form(a: int, b: int, c: int, d: int) -> int:
    return 18*a*b*c*d + b*b*c*c - 4*a*c**3 - 4*b**3*d - 27*a*a*d*d


def is_irreducible(f: BinaryCubicForm | tuple) -> bool:
    """Irreducibility over Q: nonzero discriminant and no rational root.

    A root (p:q) in lowest terms forces q | a and p | d (with the a = 0 and
    d = 0 cases giving roots at (1:0) and (0:1) directly).
    """
    a, b, c, d = f.coeffs() if isinstance(f, BinaryCubicForm) else tuple(f)
    if a == 0 or d == 0 or disc_form(a, b, c, d) == 0:
        return False
    for q in range(1, abs(a) + 1):
        if a % q:
            continue
        for p in range(1, abs(d) + 1):
            if d % p or math.gcd(p, q) != 1:
                continue
            if a*p**3 + b*p*p*q + c*p*q*q + d*q**3 == 0:
                return False
            if -a*p**3 + b*p*p*q - c*p*q*q + d*q**3 == 0:
                return False
    return True


def transform_coeffs(f, M):
    """Coefficients of f((x,y) . M), i.e. substitute x -> al*x + be*y, y -> ga*x + de*y."""
    a, b, c, d = f
    al, be, ga, de = M
    return (
        a*al**3 + b*al*al*ga + c*al*ga*ga + d*ga**3,
        3*a*al*al*be + b*(al*al*de + 2*al*be*ga) + c*(2*al*de*ga + be*ga*ga) + 3*d*de*ga*ga,
        3*a*al*be*be + b*(2*al*be*de + be*be*ga) + c*(al*de*de + 2*be*de*ga) + 3*d*de*de*ga,
        a*be**3 + b*be*be*de + c*be*de*de + d*de**3,
    )


# unimodular matrices with entries in [-1, 1]; enough to connect any two
# in-domain forms of one class (verified against a radius-2 set in tests)
_SMALL_GL2 = tuple(M for M in product((-1, 0, 1), repeat=4)
                   if M[0]*M[3] - M[1]*M[2] in (1, -1))

_EPS = 1e-7


def _transform_arrays(F: np.ndarray, M) -> np.ndarray:
    a, b, c, d = F[:, 0], F[:, 1], F[:, 2], F[:, 3]
    al, be, ga, de = M
    return np.stack([
        a*al**3 + b*al*al*ga + c*al*ga*ga + d*ga**3,
        3*a*al*al*be + b*(al*al*de + 2*al*be*ga) + c*(2*al*de*ga + be*ga*ga) + 3*d*de*ga*ga,
        3*a*al*be*be + b*(2*al*be*de + be*be*ga) + c*(al*de*de + 2*be*de*ga) + 3*d*de*de*ga,
        a*be**3 + b*be*be*de + c*be*de*de + d*de**3,
    ], axis=1)


def _disc_arrays(F: np.ndarray) -> np.ndarray:
    a, b, c, d = F[:, 0], F[:, 1], F[:, 2], F[:, 3]
    return 18*a*b*c*d + (b*c)**2 - 4*a*c**3 - 4*d*b**3 - 27*(a*d)**2


def _single_real_root(F: np.ndarray) -> np.ndarray:
    """Real root of a t^3 + b t^2 + c t + d for rows with negative disc (Cardano)."""
    a = F[:, 0].astype(np.float64)
    b = F[:, 1].astype(np.float64)
    c = F[:, 2].astype(np.float64)
    d = F[:, 3].astype(np.float64)
    p = (3*a*c - b*b) / (3*a*a)
    q = (2*b**3 - 9*a*b*c + 27*a*a*d) / (27*a**3)
    sq = np.sqrt(np.maximum(q*q/4 + p**3/27, 0))
    u = np.cbrt(-q/2 + sq) + np.cbrt(-q/2 - sq)
    return u - b / (3*a)


def _in_domain_pos(F: np.ndarray) -> np.ndarray:
    a, b, c, d = F[:, 0], F[:, 1], F[:, 2], F[:, 3]
    P = b*b - 3*a*c
    Q = b*c - 9*a*d
    R = c*c - 3*b*d
    return (a > 0) & (P > 0) & (np.abs(Q) <= P) & (P <= R)


def _in_domain_neg(F: np.ndarray) -> np.ndarray:
    a, d = F[:, 0], F[:, 3]
    ok = (a > 0) & (d != 0)
    out = np.zeros(len(F), dtype=bool)
    if not ok.any():
        return out
    G = F[ok]
    th = _single_real_root(G)
    s = G[:, 1] / G[:, 0] + th
    t = -G[:, 3] / (G[:, 0] * th)
    out[ok] = (np.abs(s) <= 1 + _EPS) & (t >= 1 - _EPS)
    return out


def _lex_less(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    lt = np.zeros(len(A), dtype=bool)
    eq = np.ones(len(A), dtype=bool)
    for j in range(4):
        lt |= eq & (A[:, j] < B[:, j])
        eq &= A[:, j] == B[:, j]
    return lt


def _canonical_keys(F: np.ndarray, sign: int) -> np.ndarray:
    """Lex-min in-domain neighbor of each (already in-domain) form."""
    in_domain = _in_domain_pos if sign > 0 else _in_domain_neg
    best = F.copy()
    for M in _SMALL_GL2:
        G = _transform_arrays(F, M)
        upd = in_domain(G) & _lex_less(G, best)
        best[upd] = G[upd]
    return best


def _reduce_to_domain(f: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    """Walk an arbitrary irreducible form into the reduction domain."""
    a, b, c, d = f
    D = disc_form(a, b, c, d)
    if D == 0:
        raise ValueError("degenerate form")
    for _ in range(10_000):
        if D > 0:
            P = b*b - 3*a*c
            Q = b*c - 9*a*d
            R = c*c - 3*b*d
            if R < P:
                a, b, c, d = transform_coeffs((a, b, c, d), (0, -1, 1, 0))
                continue
            if abs(Q) > P:
                k = -round(Q / (2*P))
                a, b, c, d = transform_coeffs((a, b, c, d), (1, k, 0, 1))
                continue
        else:
            if a == 0:
                raise ValueError("reducible form")
            roots = np.array([[a, b, c, d]], dtype=np.int64)
            th = float(_single_real_root(roots)[0])
            s = b/a + th
            t = -d/(a*th) if th else math.inf
            if t < 1 - 1e-12:
                a, b, c, d = transform_coeffs((a, b, c, d), (0, -1, 1, 0))
                continue
            if abs(s) > 1 + 1e-12:
                k = -round(s / 2) or (-1 if s > 0 else 1)
                a, b, c, d = transform_coeffs((a, b, c, d), (1, k, 0, 1))
                continue
        break
    else:
        raise RuntimeError(f"reduction did not converge for {f}")
    if a < 0:
        a, b, c, d = -a, -b, -c, -d
    return (a, b, c, d)


def canonical_form(f: BinaryCubicForm | tuple) -> BinaryCubicForm:
    """Canonical representative of the GL_2(Z)-class of an irreducible form."""
    coeffs = f.coeffs() if isinstance(f, BinaryCubicForm) else tuple(f)
    if not is_irreducible(coeffs):
        raise ValueError(f"form {coeffs} is reducible or degenerate")
    g = _reduce_to_domain(coeffs)
    sign = 1 if disc_form(*g) > 0 else -1
    key = _canonical_keys(np.array([g], dtype=np.int64), sign)[0]
    return BinaryCubicForm(*(int(v) for v in key))


# ---------------------------------------------------------------------------
# enumeration of the reduction domains

def _expand_windows(base: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """All (base[i], v) with lo[i] <= v <= hi[i], flattened."""
    cnt = np.maximum(hi - lo + 1, 0)
    tot = int(cnt.sum())
    if tot == 0:
        return None, None
    rep = np.repeat(base, cnt)
    offs = np.arange(tot, dtype=np.int64) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    return rep, np.repeat(lo, cnt) + offs


def _candidates_pos_for_a(a: int, X: int, lo_disc: int) -> list[np.ndarray]:
    sX = math.isqrt(X)
    chunks = []
    rad = X**0.5 - 27*a*a/4.0
    if rad >= 0:
        bmax = int(1.5*a + rad**0.5) + 2
        for b in range(-bmax, bmax + 1):
            pmin = max(1, b*b - 3*a*abs(b) + 9*a*a)
            if pmin > sX:
                continue
            cmin = -((sX - b*b) // (3*a))
            cmax = (b*b - pmin) // (3*a)
            c = np.arange(cmin, cmax + 1, dtype=np.int64)
            if not len(c):
                continue
            P = b*b - 3*a*c
            dlo = -((P - b*c) // (9*a))
            dhi = (b*c + P) // (9*a)
            cc, dd = _expand_windows(c, dlo, dhi)
            if cc is None:
                continue
            PP = b*b - 3*a*cc
            Q = b*cc - 9*a*dd
            R = cc*cc - 3*b*dd
            keep = (np.abs(Q) <= PP) & (R >= PP)
            cc, dd = cc[keep], dd[keep]
            if not len(cc):
                continue
            F = np.empty((len(cc), 4), dtype=np.int64)
            F[:, 0] = a
            F[:, 1] = b
            F[:, 2] = cc
            F[:, 3] = dd
            D = _disc_arrays(F)
            F = F[(D > lo_disc) & (D < X)]
            if len(F):
                chunks.append(F)
    return chunks


def _candidates_neg_for_a(a: int, X: int, lo_disc: int) -> list[np.ndarray]:
    chunks = []
    bmax = int(1.5*a + (X/3.0)**0.25) + 2
    tmax = (16*X/(27.0*a**4))**(1/3.0)
    cmax = int(a*tmax + a/2 + (X/3.0)**0.25) + 2
    c_all = np.arange(-cmax, cmax + 1, dtype=np.int64)
    for b in range(-bmax, bmax + 1):
        # disc as a quadratic in d opens downward; keep d with -X < disc < 0
        A2 = -27.0*a*a
        B2 = 18.0*a*b*c_all - 4.0*b**3
        C2 = (1.0*b*b)*c_all*c_all - 4.0*a*c_all.astype(np.float64)**3
        disc0 = B2*B2 - 4*A2*C2
        discX = B2*B2 - 4*A2*(C2 + X)
        sel = discX >= 0
        if not sel.any():
            continue
        c = c_all[sel]
        B2, C2, disc0, discX = B2[sel], C2[sel], disc0[sel], discX[sel]
        sqX = np.sqrt(discX)
        lo_all = (-B2 + sqX) / (2*A2)
        hi_all = (-B2 - sqX) / (2*A2)
        mid = disc0 > 0
        sq0 = np.sqrt(np.maximum(disc0, 0))
        m1 = np.where(mid, (-B2 + sq0) / (2*A2), hi_all)
        m2 = np.where(mid, (-B2 - sq0) / (2*A2), np.inf)
        for L, H in ((lo_all, m1), (m2, hi_all)):
            fin = np.isfinite(L) & np.isfinite(H)
            lo_i = np.where(fin, np.ceil(np.where(fin, L, 0) - 1e-9), 1).astype(np.int64)
            hi_i = np.where(fin, np.floor(np.where(fin, H, 0) + 1e-9), 0).astype(np.int64)
            cc, dd = _expand_windows(c, lo_i, hi_i)
            if cc is None:
                continue
            keep = dd != 0
            cc, dd = cc[keep], dd[keep]
            if not len(cc):
                continue
            F = np.empty((len(cc), 4), dtype=np.int64)
            F[:, 0] = a
            F[:, 1] = b
            F[:, 2] = cc
            F[:, 3] = dd
            D = _disc_arrays(F)
            F = F[(D < -lo_disc) & (D > -X)]
            if len(F):
                F = F[_in_domain_neg(F)]
            if len(F):
                chunks.append(F)
    return chunks


def _candidates(sign: int, X: int, lo_disc: int = 0, threads: int = 1) -> np.ndarray:
    """All in-domain candidate forms with lo_disc < sign*disc < X.

    Work is sharded by leading coefficient; shards are merged in a-order,
    so the output is identical for every thread count.
    """
    if sign > 0:
        per_a = _candidates_pos_for_a
        amax = int(2 * X**0.25 / 27**0.5) + 1
    else:
        per_a = _candidates_neg_for_a
        amax = int((16*X/27.0)**0.25) + 1
    a_values = range(1, amax + 1)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            shards = list(pool.map(lambda a: per_a(a, X, lo_disc), a_values))
    else:
        shards = [per_a(a, X, lo_disc) for a in a_values]
    chunks = [c for shard in shards for c in shard]
    return np.concatenate(chunks) if chunks else np.empty((0, 4), dtype=np.int64)


def _dedup_rows(F: np.ndarray) -> np.ndarray:
    view = np.ascontiguousarray(F).view([(n, "<i8") for n in "abcd"]).ravel()
    _, idx = np.unique(view, return_index=True)
    return F[np.sort(idx)]


def _all_real_roots(F: np.ndarray) -> np.ndarray:
    """(N, 3) real roots with NaN padding; handles both discriminant signs."""
    a = F[:, 0].astype(np.float64)
    b = F[:, 1].astype(np.float64)
    c = F[:, 2].astype(np.float64)
    d = F[:, 3].astype(np.float64)
    p = (3*a*c - b*b) / (3*a*a)
    q = (2*b**3 - 9*a*b*c + 27*a*a*d) / (27*a**3)
    disc = q*q/4 + p**3/27
    out = np.full((len(F), 3), np.nan)
    one = disc > 0
    if one.any():
        sq = np.sqrt(np.where(one, disc, 0))
        u = np.cbrt(-q/2 + sq) + np.cbrt(-q/2 - sq)
        out[one, 0] = (u - b/(3*a))[one]
    three = ~one
    if three.any():
        pn, qn = p[three], q[three]
        r = np.sqrt(np.maximum(-pn/3, 1e-300))
        arg = np.clip(3*qn/(2*pn) * np.sqrt(np.maximum(-3/pn, 0)), -1, 1)
        phi = np.arccos(arg)
        shift = (b/(3*a))[three]
        for k in range(3):
            out[three, k] = 2*r*np.cos((phi - 2*math.pi*k)/3) - shift
    return out


def _reducible_mask(F: np.ndarray) -> np.ndarray:
    """Exact rational-root detection, guided by floating-point roots.

    A root p/q in lowest terms has q | a, so for every divisor q of a the
    integer p must be round(root * q); that candidate is then checked
    exactly in integer arithmetic.
    """
    red = F[:, 3] == 0
    roots = _all_real_roots(F)
    a, b, c, d = F[:, 0], F[:, 1], F[:, 2], F[:, 3]
    for q in range(1, int(F[:, 0].max(initial=0)) + 1):
        mq = a % q == 0
        if not mq.any():
            continue
        for k in range(3):
            th = roots[:, k]
            ok = mq & np.isfinite(th)
            if not ok.any():
                continue
            pi = np.where(ok, np.round(np.where(np.isfinite(th), th, 0) * q), 1).astype(np.int64)
            val = a*pi**3 + b*pi*pi*q + c*pi*q*q + d*q**3
            red |= ok & (val == 0)
    return red


# ---------------------------------------------------------------------------
# maximality and splitting

def _unimodular_moving(g: int, de: int) -> tuple[int, int, int, int]:
    """A determinant-1 integer matrix sending (1:0) to the projective point (g:de)."""
    gg, x, y = xgcd(g, de)
    if gg == -1:
        x, y = -x, -y
    return (g, -y, de, x)


def maximal_at(f: BinaryCubicForm | tuple, q: int) -> bool:
    """Whether the cubic ring of f is maximal at the prime q.

    f is non-maximal at q exactly when q divides all four coefficients, or
    some multiple root (g:de) of f mod q, moved to (1:0) by a unimodular
    substitution, leaves leading coefficients with q^2 | a' and q | b'.
    """
    a, b, c, d = f.coeffs() if isinstance(f, BinaryCubicForm) else tuple(f)
    if a % q == 0 and b % q == 0 and c % q == 0 and d % q == 0:
        return False
    qq = q * q
    for g, de in [(1, t) for t in range(q)] + [(0, 1)]:
        if (a*g**3 + b*g*g*de + c*g*de*de + d*de**3) % q:
            continue
        a2, b2, _, _ = transform_coeffs((a, b, c, d), _unimodular_moving(g, de))
        if b2 % q == 0 and a2 % qq == 0:
            return False
    return True


_P1_F3 = ((1, 0), (1, 1), (1, 2), (0, 1))
_MOVE_F3 = {(1, 0): (1, 0, 0, 1), (1, 1): (1, 0, 1, 1), (1, 2): (1, 0, 2, 1), (0, 1): (0, -1, 1, 0)}


def splitting_at_3(f: BinaryCubicForm | tuple) -> str:
    """Factorization type of 3 in the cubic field of f (f maximal at 3)."""
    coeffs = f.coeffs() if isinstance(f, BinaryCubicForm) else tuple(f)
    arr = np.array([coeffs], dtype=np.int64)
    code = _splitting3_arrays(arr, _disc_arrays(arr))[0]
    if code < 0:
        raise ValueError(f"form {coeffs} is not maximal at 3")
    return SPLIT_CODES[code]


def _splitting3_arrays(F: np.ndarray, D: np.ndarray) -> np.ndarray:
    a, b, c, d = F[:, 0], F[:, 1], F[:, 2], F[:, 3]
    nroots = np.zeros(len(F), dtype=np.int64)
    for x, y in _P1_F3:
        nroots += (a*x**3 + b*x*x*y + c*x*y*y + d*y**3) % 3 == 0
    ram = D % 3 == 0
    out = np.full(len(F), -1, dtype=np.int64)
    out[~ram & (nroots == 3)] = 0
    out[~ram & (nroots == 0)] = 1
    out[~ram & (nroots == 1)] = 2
    if ram.any():
        mult2 = np.zeros(len(F), dtype=bool)
        mult3 = np.zeros(len(F), dtype=bool)
        for pt in _P1_F3:
            G = _transform_arrays(F, _MOVE_F3[pt])
            m2 = (G[:, 0] % 3 == 0) & (G[:, 1] % 3 == 0)
            mult2 |= m2
            mult3 |= m2 & (G[:, 2] % 3 == 0)
        out[ram & mult2 & ~mult3] = 3
        out[ram & mult3] = 4
    return out


# ---------------------------------------------------------------------------
# the field-level pipeline and its cache

@dataclass(frozen=True)
class CubicFieldRecord:
    form: BinaryCubicForm
    d_L: int
    signature: str               # "totally real" or "complex"
    split3: str
    nowhere_totally_ramified: bool


class CubicTable:
    """Columnar store of cubic field records for one discriminant sign."""

    def __init__(self, sign: int, bound: int, forms: np.ndarray, d: np.ndarray,
                 split3: np.ndarray, ntr: np.ndarray):
        self.sign = sign
        self.bound = bound
        self.forms = forms
        self.d = d
        self.split3 = split3
        self.ntr = ntr

    def __len__(self) -> int:
        return len(self.d)

    def records(self):
        for i in range(len(self.d)):
            yield CubicFieldRecord(
                form=BinaryCubicForm(*(int(v) for v in self.forms[i])),
                d_L=int(self.d[i]),
                signature="totally real" if self.d[i] > 0 else "complex",
                split3=SPLIT_CODES[int(self.split3[i])],
                nowhere_totally_ramified=bool(self.ntr[i]),
            )

    def sorted_by_disc(self) -> "CubicTable":
        order = np.lexsort((self.forms[:, 3], self.forms[:, 2],
                            self.forms[:, 1], self.forms[:, 0], np.abs(self.d)))
        return CubicTable(self.sign, self.bound, self.forms[order],
                          self.d[order], self.split3[order], self.ntr[order])


def _build_window(sign: int, lo_disc: int, hi_disc: int, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Unique irreducible maximal classes with lo_disc < |disc| < hi_disc."""
    cands = _candidates(sign, hi_disc, lo_disc, threads)
    if not len(cands):
        return np.empty((0, 4), dtype=np.int64), np.empty(0, dtype=np.int64)
    U = _dedup_rows(_canonical_keys(cands, sign))
    U = U[~_reducible_mask(U)]
    D = _disc_arrays(U)
    keep = np.ones(len(U), dtype=bool)
    absD = np.abs(D)
    for q in primes_upto(math.isqrt(hi_disc)):
        hit = np.nonzero((absD % (q*q) == 0) & keep)[0]
        for i in hit:
            if not maximal_at(tuple(int(v) for v in U[i]), q):
                keep[i] = False
    return U[keep], D[keep]


def enumerate_forms(X: int, sign: int, threads: int = 1):
    """One canonical representative per irreducible form class, 0 < sign*disc < X.

    Ascending |disc|, ties broken by coefficients.  No maximality filter:
    this is the raw class list the field pipeline starts from.
    """
    if X < 23:
        raise ValueError("X must be >= 23")
    U = _dedup_rows(_canonical_keys(_candidates(sign, X, 0, threads), sign))
    U = U[~_reducible_mask(U)]
    D = _disc_arrays(U)
    order = np.lexsort((U[:, 3], U[:, 2], U[:, 1], U[:, 0], np.abs(D)))
    for i in order:
        yield BinaryCubicForm(*(int(v) for v in U[i]))


def enumerate_cubic_fields(X: int, sign: int, cache: "CubicCache | None" = None,
                           threads: int = 1):
    """CubicFieldRecord stream, ascending |d_L|; persists via the cache if given."""
    table = cache.get(X, sign, threads) if cache is not None else build_table(X, sign, threads=threads)
    yield from table.records()


def build_table(X: int, sign: int, lo: int = 0, threads: int = 1) -> CubicTable:
    """Enumerate all cubic field records with lo < |d_L| < X of the given sign."""
    if X < 23:
        raise ValueError("X must be >= 23")
    forms, d = _build_window(sign, lo, X, threads)
    split3 = _splitting3_arrays(forms, d) if len(forms) else np.empty(0, dtype=np.int64)
    if len(forms):
        sf = squarefree_sieve(0, int(np.abs(d).max()) + 4)
        ntr = fundamental_mask(d, sf)
    else:
        ntr = np.empty(0, dtype=bool)
    return CubicTable(sign, X, forms, d, split3, ntr).sorted_by_disc()


def count_by_family(table: CubicTable, family: QuadFamily, require_3_split: bool) -> int:
    """Nowhere-totally-ramified fields with d_L in the family, optionally 3 split."""
    if family.bound > table.bound:
        raise ValueError(f"family bound {family.bound} exceeds table bound {table.bound}")
    if family.sign != table.sign:
        raise ValueError("family and table disagree on sign")
    mask = table.ntr & (np.abs(table.d) < family.bound)
    if family.coset3 is not None:
        mask &= coset3_array(table.d) == family.coset3
    if require_3_split:
        mask &= table.split3 == 0
    return int(mask.sum())


def counts_per_discriminant(table: CubicTable, bound: int, split_where_coset1: bool = True):
    """Map d_L -> field count over nowhere-totally-ramified records.

    With split_where_coset1, records with d_L in Q_3^x2 are counted only
    when 3 splits completely (the set the class-group correspondence
    matches to Cl(O_K[1/3]) rather than Cl(O_K)).
    """
    mask = table.ntr & (np.abs(table.d) < bound)
    if split_where_coset1:
        mask &= (table.d % 3 != 1) | (table.split3 == 0)
    vals, counts = np.unique(table.d[mask], return_counts=True)
    return dict(zip((int(v) for v in vals), (int(c) for c in counts)))


# ---------------------------------------------------------------------------
# persistence: CSV body with a JSON header line

def save_table(table: CubicTable, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format_version": CACHE_FORMAT_VERSION,
        "sign": table.sign,
        "bound": table.bound,
        "count": len(table),
        "counts_by_split3": {SPLIT_CODES[k]: int((table.split3 == k).sum())
                             for k in range(5)},
    }
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    buf.write("a,b,c,d,d_L,signature,split3,ntr_flag\n")
    for i in range(len(table)):
        a, b, c, d = (int(v) for v in table.forms[i])
        buf.write(f"{a},{b},{c},{d},{int(table.d[i])},"
                  f"{'totally real' if table.d[i] > 0 else 'complex'},"
                  f"{SPLIT_CODES[int(table.split3[i])]},{int(table.ntr[i])}\n")
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(buf.getvalue())
    os.replace(tmp, path)


def load_table(path: str | Path) -> CubicTable:
    path = Path(path)
    try:
        with open(path) as fh:
            first = fh.readline()
            if not first.startswith("# "):
                raise CacheCorruptionError(f"{path}: missing JSON header")
            header = json.loads(first[2:])
            if header.get("format_version") != CACHE_FORMAT_VERSION:
                raise CacheCorruptionError(f"{path}: unsupported format version")
            cols = fh.readline().strip().split(",")
            if cols != ["a", "b", "c", "d", "d_L", "signature", "split3", "ntr_flag"]:
                raise CacheCorruptionError(f"{path}: unexpected columns {cols}")
            rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise CacheCorruptionError(f"{path}: {exc}") from exc
    if len(rows) != header["count"]:
        raise CacheCorruptionError(f"{path}: row count {len(rows)} != header {header['count']}")
    n = len(rows)
    forms = np.empty((n, 4), dtype=np.int64)
    d = np.empty(n, dtype=np.int64)
    split3 = np.empty(n, dtype=np.int64)
    ntr = np.empty(n, dtype=bool)
    code_of = {name: k for k, name in enumerate(SPLIT_CODES)}
    try:
        for i, row in enumerate(rows):
            forms[i] = [int(row[0]), int(row[1]), int(row[2]), int(row[3])]
            d[i] = int(row[4])
            split3[i] = code_of[row[6]]
            ntr[i] = row[7] == "1"
    except (ValueError, KeyError, IndexError) as exc:
        raise CacheCorruptionError(f"{path}: bad row {i}: {exc}") from exc
    return CubicTable(header["sign"], header["bound"], forms, d, split3, ntr)


class CubicCache:
    """On-disk cache of cubic tables, extensible to larger bounds.

    Files live under cache_dir as cubics/sign{p,n}.csv.  A request beyond
    the stored bound enumerates only the missing discriminant window and
    merges, so growing a cache never recomputes what it already has.
    """

    def __init__(self, cache_dir: str | Path):
        self.dir = Path(cache_dir) / "cubics"

    def _path(self, sign: int) -> Path:
        return self.dir / f"sign{'p' if sign > 0 else 'n'}.csv"

    def get(self, X: int, sign: int, threads: int = 1) -> CubicTable:
        path = self._path(sign)
        table = None
        if path.exists():
            table = load_table(path)
        if table is None or table.bound < X:
            lo = table.bound if table is not None else 0
            fresh = build_table(X, sign, lo=lo - 1 if lo else 0, threads=threads)
            if table is not None:
                window = np.abs(fresh.d) >= table.bound
                table = CubicTable(sign, X,
                                   np.concatenate([table.forms, fresh.forms[window]]),
                                   np.concatenate([table.d, fresh.d[window]]),
                                   np.concatenate([table.split3, fresh.split3[window]]),
                                   np.concatenate([table.ntr, fresh.ntr[window]])).sorted_by_disc()
            else:
                table = fresh
            save_table(table, path)
        if table.bound == X:
            return table
        keep = np.abs(table.d) < X
        return CubicTable(sign, X, table.forms[keep], table.d[keep],
                          table.split3[keep], table.ntr[keep])


# ---------------------------------------------------------------------------
# local masses at a prime

# maximal cubic Z_p-algebras that are not totally ramified, as
# (p-exponent of the discriminant ideal, #automorphisms); there are two
# distinct ramified quadratics, hence two "split-ramified" entries
LOCAL_TYPES = {
    "split3": (0, 6),
    "split-unramified": (0, 2),
    "inert": (0, 3),
    "split-ramified": (1, 2),
    "split-ramified-conj": (1, 2),
}

ALL_NOT_TOTALLY_RAMIFIED = tuple(LOCAL_TYPES)


def local_mass_c(p: int, sigma: tuple[str, ...] | list[str]) -> Fraction:
    """c_p = p/(p+1) * sum over the chosen local types of 1/(Disc_p * #Aut)."""
    total = Fraction(0)
    for tag in sigma:
        if tag not in LOCAL_TYPES:
            raise ValueError(f"unknown local type {tag!r}")
        e, aut = LOCAL_TYPES[tag]
        total += Fraction(1, p**e * aut)
    return Fraction(p, p + 1) * total


def alpha3_from_masses(sign: int, coset: int) -> Fraction:
    """Density table entry rebuilt from the local masses (1/12zeta(2) real, 1/4zeta(2) complex)."""
    if coset == 1:
        c3 = local_mass_c(3, ("split3",))
    elif coset == 2:
        c3 = local_mass_c(3, ("split-unramified",))
    else:
        c3 = local_mass_c(3, ("split-ramified",))
    return c3 / (12 if sign > 0 else 4)
