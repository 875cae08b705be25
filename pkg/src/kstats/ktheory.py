"""K-theoretic quantities for quadratic fields: Brauer components, u-values,
odd torsion, the kappa constant, and the unconditional empirical averages.

The minus part of K_2n(O_F)/p is Cl(O_E[1/p])/p)^chi plus a Brauer summand
of dimension 0 or 1.  For p = 3 the class part is Cl(O_K[1/3])/3 for the
quadratic field K = F (n even) or Q(sqrt(-3d)) (n odd), whose order is
2 * (a cubic-field count) + 1; that correspondence is what the empirical
averages below evaluate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cubic import CubicTable, counts_per_discriminant
from .exact import bernoulli_c, fundamental_discriminant, is_fundamental, is_odd_prime, kronecker, p_star
from .heuristics import EVEN_0, EVEN_HALF, IMAGINARY, ODD_HALF, REAL, n_class_of
from .quadratic import QuadFamily, cl_13_order, coset3_array, enumerate_discriminants

VANDIVER_VERIFIED_BELOW = 163_577_856


@dataclass(frozen=True)
class LocalClassifier:
    """(p, n, d) with d a fundamental discriminant independent of p*."""
    p: int
    n: int
    d: int

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p={self.p} is not an odd prime")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not is_fundamental(self.d):
            raise ValueError(f"{self.d} is not a fundamental discriminant")
        if self.d == p_star(self.p):
            raise ValueError(f"d = p* = {self.d} is excluded")


def d_square_class(cls: LocalClassifier) -> bool:
    """Whether d lies in Q_p^x2, i.e. (d|p) = 1."""
    return kronecker(cls.d, cls.p) == 1


def pstar_d_square_class(cls: LocalClassifier) -> bool:
    """Whether p* d lies in Q_p^x2: p | d and (-d/p | p) = 1."""
    if cls.d % cls.p:
        return False
    return kronecker(-(cls.d // cls.p), cls.p) == 1


def brauer_dim(cls: LocalClassifier) -> int:
    """Dimension (0 or 1) of the Brauer summand of (K_2n(O_F)/p)^-."""
    p, n = cls.p, cls.n
    if n % (p - 1) == 0 and d_square_class(cls):
        return 1
    if n % (p - 1) == (p - 1) // 2 and pstar_d_square_class(cls):
        return 1
    return 0


def u_value(cls: LocalClassifier) -> int:
    """Column-deficiency parameter of the random-map model for this family."""
    row = n_class_of(cls.p, cls.n)
    real = cls.d > 0
    if row == EVEN_0 and d_square_class(cls):
        return 2 if real else 1
    if row in (EVEN_HALF, ODD_HALF) and pstar_d_square_class(cls):
        if row == EVEN_HALF:
            return 2 if real else 1
        return 1 if real else 2
    if cls.n % 2 == 0:
        return 1 if real else 0
    return 0 if real else 1


def archimedean_dim(cls: LocalClassifier) -> int:
    """Contribution of the infinite places to u: 1 iff (-1)^n d > 0."""
    return 1 if ((-1) ** cls.n) * cls.d > 0 else 0


def odd_k_torsion(p: int, i: int, d: int | None = None) -> int:
    """dim of K_{2i-1}(O_F)_p: 1 iff [F(zeta_p):F] divides i, else 0.

    d None means F = Q.  For quadratic F the degree halves exactly when
    F = Q(sqrt(p*)).
    """
    if not is_odd_prime(p) or i < 1:
        raise ValueError("need an odd prime p and i >= 1")
    if d is None:
        degree = p - 1
    else:
        if not is_fundamental(d):
            raise ValueError(f"{d} is not a fundamental discriminant")
        degree = (p - 1) // 2 if d == p_star(p) else p - 1
    return 1 if i % degree == 0 else 0


@dataclass(frozen=True)
class KappaValue:
    """dim K_2n(Z)/p; correct assuming Vandiver's conjecture for p."""
    n: int
    p: int
    value: int
    assumes_vandiver: bool
    vandiver_verified: bool


def kappa(n: int, p: int, max_k: int = 500) -> KappaValue:
    """kappa(2n, p): 1 iff n = 2k-1 is odd and p divides the numerator of |B_2k/(4k)|."""
    if not is_odd_prime(p) or n < 1:
        raise ValueError("need an odd prime p and n >= 1")
    value = 0
    if n % 2 == 1:
        value = 1 if bernoulli_c((n + 1) // 2, max_k) % p == 0 else 0
    return KappaValue(n=n, p=p, value=value, assumes_vandiver=True,
                      vandiver_verified=p < VANDIVER_VERIFIED_BELOW)


def resolvent_discriminant(d: int, n: int) -> int:
    """Discriminant of the field whose class group carries (K_2n(O_F)/3)^-.

    That field is F itself for n even and Q(sqrt(-3d)) for n odd.
    """
    return d if n % 2 == 0 else fundamental_discriminant(-3 * d)


def k_dim_minus(d: int, n: int, p: int = 3, bound: int = 10 ** 7) -> int:
    """dim_F3 (K_2n(O_F)/3)^- through the imaginary class-group oracle.

    Only families whose resolvent field is imaginary are supported (n even
    with d < 0, or n odd with d > 0); real class groups are out of reach of
    the form oracle by design.
    """
    if p != 3:
        raise ValueError("only p = 3 has an unconditional oracle")
    cls = LocalClassifier(p=p, n=n, d=d)
    dk = resolvent_discriminant(d, n)
    if dk > 0:
        raise ValueError(f"resolvent discriminant {dk} is real; use the cubic pipeline")
    order = cl_13_order(dk, bound)
    cl_dim = 0
    while order > 1:
        order //= 3
        cl_dim += 1
    return cl_dim + brauer_dim(cls)


# ---------------------------------------------------------------------------
# empirical averages over discriminant families (p = 3, via cubic counts)

COSET_TIMES_MINUS3 = {1: 6, 2: 3, 3: 2, 6: 1}


def map_family(sign: int, coset: int | None, n: int) -> tuple[int, int | None]:
    """(sign, coset) of the resolvent family: identity for n even, times -3 for n odd."""
    if n % 2 == 0:
        return sign, coset
    return -sign, None if coset is None else COSET_TIMES_MINUS3[coset]


@dataclass(frozen=True)
class KFamilyResult:
    p: int
    n_parity: str                # "even" or "odd"
    sign: str                    # signature of F (real/imaginary)
    coset3: int | None           # F-side coset, None for all
    X: int
    empirical: Fraction          # exact mean over the family
    reference: Fraction
    sample_count: int
    statistic: str               # "class-average" or "k-average"
    conditional_flags: tuple[str, ...] = ()

    @property
    def abs_error(self) -> float:
        return abs(float(self.empirical) - float(self.reference))

    @property
    def rel_error(self) -> float:
        return float(self.empirical) / float(self.reference) - 1.0

    def to_json(self) -> dict:
        return {
            "p": self.p, "n_parity": self.n_parity, "signature": self.sign,
            "coset3": self.coset3, "X": self.X,
            "statistic": self.statistic,
            "empirical": str(self.empirical),
            "empirical_float": float(self.empirical),
            "reference": str(self.reference),
            "reference_float": float(self.reference),
            "abs_error": self.abs_error, "rel_error": self.rel_error,
            "sample_count": self.sample_count,
            "conditional_flags": list(self.conditional_flags),
        }


def _family_sums(table: CubicTable, k_sign: int, k_coset: int | None, X: int) -> tuple[int, int, int]:
    """(#discriminants, sum of 2N+1, sum of (2N+1)*3^[d in Q_3^x2]) over the K-family."""
    fam = QuadFamily(sign=k_sign, coset3=k_coset, bound=X)
    ds = enumerate_discriminants(fam)
    counts = counts_per_discriminant(table, X, split_where_coset1=True)
    vals = np.array([2 * counts.get(int(dd), 0) + 1 for dd in ds], dtype=np.int64)
    weights = np.where(coset3_array(ds) == 1, 3, 1)
    return len(ds), int(vals.sum()), int((vals * weights).sum())


def class_family_average(table: CubicTable, k_sign: int, k_coset: int | None, X: int) -> KFamilyResult:
    """Empirical average order of Cl(O_K[1/3])/3 over the K-side family.

    Each discriminant contributes 2 * #matching cubic fields + 1 (with the
    3-split requirement in the d in Q_3^x2 coset), an odd integer equal to
    the order of an elementary abelian 3-group.
    """
    n_d, tot, _ = _family_sums(table, k_sign, k_coset, X)
    ref = _class_reference(k_sign, k_coset)
    return KFamilyResult(p=3, n_parity="even", sign=REAL if k_sign > 0 else IMAGINARY,
                         coset3=k_coset, X=X,
                         empirical=Fraction(tot, n_d), reference=ref,
                         sample_count=n_d, statistic="class-average")


def _class_reference(k_sign: int, k_coset: int | None) -> Fraction:
    if k_coset == 1:
        return Fraction(10, 9) if k_sign > 0 else Fraction(4, 3)
    if k_coset is None:
        raise ValueError("reference requires a specific coset")
    return Fraction(4, 3) if k_sign > 0 else Fraction(2)


_THM12 = {
    ("even", REAL): Fraction(25, 12),
    ("even", IMAGINARY): Fraction(11, 4),
    ("odd", REAL): Fraction(9, 4),
    ("odd", IMAGINARY): Fraction(19, 12),
}


def theorem12_reference() -> dict[tuple[str, str], Fraction]:
    return dict(_THM12)


def empirical_k_average(tables: dict[int, CubicTable], n_parity: str, f_sign: int,
                        X: int) -> KFamilyResult:
    """Empirical average of #K_2n(O_F)_3 over all F of one signature, |d_F| < X.

    Per discriminant the value is (2N+1) * 3^(Brauer dim), evaluated on the
    resolvent family.  For n even that family is the F-family itself; for
    n odd each F-coset maps to a K-coset with a different bound scale, so
    the K-side cell averages are recombined with the F-side coset weights.
    """
    if n_parity not in ("even", "odd"):
        raise ValueError("n_parity must be 'even' or 'odd'")
    sign_label = REAL if f_sign > 0 else IMAGINARY
    ref = _THM12[(n_parity, sign_label)]
    if n_parity == "even":
        table = tables[f_sign]
        n_d, _, tot_k = _family_sums(table, f_sign, None, X)
        emp = Fraction(tot_k, n_d)
        samples = n_d
    else:
        # weight K-side cell averages by the empirical F-side coset counts
        num = Fraction(0)
        samples = 0
        for coset in (1, 2, 3, 6):
            f_count = len(enumerate_discriminants(QuadFamily(sign=f_sign, coset3=coset, bound=X)))
            k_sign, k_coset = map_family(f_sign, coset, n=1)
            n_d, _, tot_k = _family_sums(tables[k_sign], k_sign, k_coset, X)
            num += Fraction(f_count) * Fraction(tot_k, n_d)
            samples += f_count
        emp = num / samples
    return KFamilyResult(p=3, n_parity=n_parity, sign=sign_label, coset3=None, X=X,
                         empirical=emp, reference=ref, sample_count=samples,
                         statistic="k-average")


def theorem12_run(tables: dict[int, CubicTable], X: int) -> list[KFamilyResult]:
    """The four signature-level averages of #K_2n(O_F)_3 at bound X."""
    out = []
    for parity in ("even", "odd"):
        for f_sign in (1, -1):
            out.append(empirical_k_average(tables, parity, f_sign, X))
    return out
