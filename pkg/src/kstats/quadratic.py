"""Fundamental discriminants by sign and 3-adic class, plus an imaginary class-group oracle.

The oracle counts reduced primitive positive-definite binary quadratic
forms and uses Gaussian composition on them; it exists to certify the
cubic-field counts, so it favors exactness over speed.  Real-quadratic
class data is never computed here: real-side information flows through
the cubic-field correspondence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exact import (ResourceLimitError, is_fundamental, kronecker,
                    squarefree_sieve, xgcd)

ZETA2 = math.pi ** 2 / 6

CLASS_GROUP_BOUND = 10 ** 7

# density of fundamental discriminants with |d| < X in each (sign, coset) family
# is ALPHA2[coset]/zeta(2) * X; the sign does not matter
ALPHA2 = {1: Fraction(3, 16), 2: Fraction(3, 16), 3: Fraction(1, 16), 6: Fraction(1, 16)}

COSETS = (1, 2, 3, 6)


@dataclass(frozen=True)
class QuadFamily:
    """Fundamental discriminants of one sign, optionally in one 3-adic square class."""
    sign: int                 # +1 or -1
    coset3: int | None = None  # 1, 2, 3, 6 or None for all
    bound: int = 0            # enumerate |d| < bound

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.coset3 not in (None, 1, 2, 3, 6):
            raise ValueError("coset3 must be 1, 2, 3, 6 or None")
        if self.bound < 3:
            raise ValueError("bound must be >= 3")


def fundamental_mask(d: np.ndarray, squarefree: np.ndarray) -> np.ndarray:
    """Vectorized is_fundamental for |d| < len(squarefree)."""
    absd = np.abs(d)
    m4 = d % 4
    out = np.zeros(len(d), dtype=bool)
    one = m4 == 1
    out[one] = squarefree[absd[one]]
    zero = m4 == 0
    m = d[zero] // 4
    mm = m % 4
    out[zero] = ((mm == 2) | (mm == 3)) & squarefree[np.abs(m)]
    out &= absd > 2
    return out


def coset3_array(d: np.ndarray) -> np.ndarray:
    m3 = d % 3
    out = np.where(m3 == 0, np.where(d % 9 == 3, 3, 6), m3)
    return out


@lru_cache(maxsize=8)
def _fundamental_below(bound: int, sign: int) -> np.ndarray:
    sf = squarefree_sieve(0, bound)
    d = sign * np.arange(bound, dtype=np.int64)
    mask = fundamental_mask(d, sf)
    return d[mask]


def enumerate_discriminants(family: QuadFamily) -> np.ndarray:
    """All fundamental d in the family with |d| < bound, ascending in |d|."""
    d = _fundamental_below(family.bound, family.sign)
    if family.coset3 is not None:
        d = d[coset3_array(d) == family.coset3]
    return d


@dataclass(frozen=True)
class DensityReport:
    family: QuadFamily
    count: int
    ratio: float
    reference: float

    @property
    def rel_error(self) -> float:
        return self.ratio / self.reference - 1.0


def density_report(family: QuadFamily) -> DensityReport:
    """Empirical count/X against the sieve density ALPHA2/zeta(2)."""
    count = len(enumerate_discriminants(family))
    if family.coset3 is None:
        a2 = sum(ALPHA2.values())
    else:
        a2 = ALPHA2[family.coset3]
    return DensityReport(family=family, count=count,
                         ratio=count / family.bound,
                         reference=float(a2) / ZETA2)


# ---------------------------------------------------------------------------
# binary quadratic forms: the imaginary class-group oracle

def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """All reduced primitive positive-definite forms of discriminant d < 0."""
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError("d must be a negative discriminant")
    out = []
    for b in range(d % 2, math.isqrt(-d // 3) + 1, 2):
        if 3 * b * b > -d:
            break
        ac = (b * b - d) // 4
        a = max(b, 1)
        while a * a <= ac:
            if ac % a == 0:
                c = ac // a
                if math.gcd(math.gcd(a, b), c) == 1:
                    out.append((a, b, c))
                    if 0 < b < a < c:
                        out.append((a, -b, c))
            a += 1
    return out


def reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    while True:
        if a > c:
            a, b, c = c, -b, a
            continue
        if abs(b) > a:
            r = b % (2 * a)
            if r > a:
                r -= 2 * a
            c += (r * r - b * b) // (4 * a)
            b = r
            continue
        if (abs(b) == a or a == c) and b < 0:
            b = -b
            continue
        return (a, b, c)


def compose(f1: tuple[int, int, int], f2: tuple[int, int, int], d: int) -> tuple[int, int, int]:
    """Gaussian composition of primitive forms of discriminant d, reduced."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    s = (b1 + b2) // 2
    g1, u1, v1 = xgcd(a1, a2)
    g, u2, v2 = xgcd(g1, s)
    a3 = a1 * a2 // (g * g)
    b3 = (u2 * u1 * a1 * b2 + u2 * v1 * a2 * b1 + v2 * (b1 * b2 + d) // 2) // g
    b3 %= 2 * a3
    c3 = (b3 * b3 - d) // (4 * a3)
    return reduce_form(a3, b3, c3)


def principal_form(d: int) -> tuple[int, int, int]:
    k = d & 1
    return (1, k, (k * k - d) // 4)


def form_pow(f: tuple[int, int, int], n: int, d: int) -> tuple[int, int, int]:
    r = principal_form(d)
    g = f
    while n:
        if n & 1:
            r = compose(r, g, d)
        g = compose(g, g, d)
        n >>= 1
    return r


@dataclass(frozen=True)
class ImaginaryClassData:
    d: int
    h: int
    rank3: int


def _check_negative_fundamental(d: int, bound: int) -> None:
    if d >= 0 or not is_fundamental(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    if -d > bound:
        raise ResourceLimitError(f"|d|={-d} exceeds class-group bound {bound}")


@lru_cache(maxsize=100_000)
def _class_data(d: int) -> tuple[int, int, frozenset]:
    """(h, rank3, set of cube classes) for negative fundamental d."""
    forms = reduced_forms(d)
    cubes = [form_pow(f, 3, d) for f in forms]
    ident = principal_form(d)
    torsion = sum(1 for c in cubes if c == ident)
    rank3 = round(math.log(torsion, 3))
    assert 3 ** rank3 == torsion, (d, torsion)
    return len(forms), rank3, frozenset(cubes)


def imaginary_class_group(d: int, bound: int = CLASS_GROUP_BOUND) -> ImaginaryClassData:
    """Class number and 3-rank of Cl(O_K) for K = Q(sqrt(d)), d < 0 fundamental."""
    _check_negative_fundamental(d, bound)
    h, rank3, _ = _class_data(d)
    return ImaginaryClassData(d=d, h=h, rank3=rank3)


def cl_13_order(d: int, bound: int = CLASS_GROUP_BOUND) -> int:
    """Order of Cl(O_K[1/3])/3 for imaginary K, as an exact power of 3.

    Cl(O_K[1/3]) is Cl(O_K) modulo the classes of primes above 3.  When 3
    is inert or ramified those classes have order dividing 2, so the
    3-part is untouched; when 3 splits we quotient by the class of a form
    of norm 3, which lowers the 3-rank exactly when that class is not
    already a cube.
    """
    _check_negative_fundamental(d, bound)
    h, rank3, cubes = _class_data(d)
    if kronecker(d, 3) == 1:
        p3 = _norm3_form(d)
        if p3 not in cubes:
            rank3 -= 1
    return 3 ** rank3


def _norm3_form(d: int) -> tuple[int, int, int]:
    """Reduced class of a form (3, b, c), the prime above 3 when 3 splits."""
    for b in range(-2, 3):
        if (b * b - d) % 12 == 0:
            return reduce_form(3, b, (b * b - d) // 12)
    raise ValueError(f"3 is not split for d={d}")


def class_number_analytic(d: int) -> int:
    """Independent class-number oracle from the finite character sum.

    Evaluates the Dirichlet class number formula
    h = w sqrt|d| L(1, chi_d) / (2 pi) in its closed finite form
    h = w / (2 (2 - chi_d(2))) * sum_{0 < a < |d|/2} chi_d(a).
    """
    if d >= 0 or not is_fundamental(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    w = 6 if d == -3 else 4 if d == -4 else 2
    s = sum(kronecker(d, a) for a in range(1, (-d) // 2 + (-d) % 2))
    num = w * s
    den = 2 * (2 - kronecker(d, 2))
    assert num % den == 0, d
    return num // den
