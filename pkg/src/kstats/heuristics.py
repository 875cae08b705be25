"""Cohen-Lenstra constants and the conjectured distribution/average tables.

The constant alpha(p, u, r) is the limiting probability that a uniform
random map F_p^{m+u} -> F_p^m has cokernel of F_p-dimension r as m grows.
Tables are evaluated in exact rational arithmetic wherever they are exact;
alpha itself carries a certified truncation bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import is_odd_prime

# row labels, one per congruence box of n
EVEN_0 = "n even, n = 0 (mod p-1)"
EVEN_HALF = "n even, n = (p-1)/2 (mod p-1)"
EVEN_OTHER = "n even, all other cases"
ODD_HALF = "n odd, n = (p-1)/2 (mod p-1)"
ODD_OTHER = "n odd, all other cases"
N_CLASSES = (EVEN_0, EVEN_HALF, EVEN_OTHER, ODD_HALF, ODD_OTHER)

REAL = "real"
IMAGINARY = "imaginary"

# optional p-adic refinement of a row: the square-class condition attached
# to it, its complement, or no condition (signature-only table)
COND_D_SQUARE = "d in Qp^x2"
COND_PSTAR_D_SQUARE = "p*d in Qp^x2"
COND_COMPLEMENT = "complement"


def valid_n_classes(p: int) -> tuple[str, ...]:
    """Row labels that contain at least one n >= 1 for this prime.

    n even realizes the even residues mod p-1 and n odd the odd ones, so a
    row is empty exactly when its residue class has the wrong parity or the
    excluded residues use up the whole parity class.
    """
    half = (p - 1) // 2
    even_residues = half          # residues 0, 2, ..., p-3
    odd_residues = half
    rows = [EVEN_0]
    if half % 2 == 0:
        rows.append(EVEN_HALF)
    if even_residues - 1 - (1 if half % 2 == 0 else 0) >= 1:
        rows.append(EVEN_OTHER)
    if half % 2 == 1:
        rows.append(ODD_HALF)
    if odd_residues - (1 if half % 2 == 1 else 0) >= 1:
        rows.append(ODD_OTHER)
    return tuple(r for r in N_CLASSES if r in rows)


def n_class_of(p: int, n: int) -> str:
    """Which row of the tables a given n >= 1 falls in."""
    if n < 1:
        raise ValueError("n must be >= 1")
    half = (p - 1) // 2
    if n % 2 == 0:
        if n % (p - 1) == 0:
            return EVEN_0
        if n % (p - 1) == half:
            return EVEN_HALF
        return EVEN_OTHER
    if n % (p - 1) == half:
        return ODD_HALF
    return ODD_OTHER


@dataclass(frozen=True)
class AlphaValue:
    p: int
    u: int
    r: int
    value: float
    error_bound: float


@dataclass(frozen=True)
class FamilySelector:
    """One box of the conjecture tables: congruence row, signature, optional local condition."""
    p: int
    n_class: str
    sign: str
    local_condition: str | None = None

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p={self.p} is not an odd prime")
        if self.n_class not in N_CLASSES:
            raise ValueError(f"unknown row {self.n_class!r}")
        if self.n_class not in valid_n_classes(self.p):
            raise ValueError(f"row {self.n_class!r} is empty for p={self.p}")
        if self.sign not in (REAL, IMAGINARY):
            raise ValueError(f"sign must be {REAL!r} or {IMAGINARY!r}")
        cond = self.local_condition
        if cond is None:
            return
        if self.n_class == EVEN_0 and cond in (COND_D_SQUARE, COND_COMPLEMENT):
            return
        if self.n_class in (EVEN_HALF, ODD_HALF) and cond in (COND_PSTAR_D_SQUARE, COND_COMPLEMENT):
            return
        raise ValueError(f"condition {cond!r} does not apply to row {self.n_class!r}")


@dataclass
class DistributionTable:
    """Probabilities Prob(dim = r) for r = 0..truncation_r, plus leftover tail mass."""
    entries: dict[int, float] = field(default_factory=dict)
    truncation_r: int = 0
    tail_mass: float = 0.0


def alpha(p: int, u: int, r: int, tol: float = 1e-12) -> AlphaValue:
    """alpha(p,u,r) with a certified truncation error bound <= tol.

    The infinite product prod_{i>r}(1 - p^-i) is truncated at an index N
    chosen so that the exact geometric tail bound sum_{i>N} p^-i / (1-1/p)
    keeps the absolute error below tol; the truncated value itself is
    computed as an exact Fraction before the final float conversion.
    """
    if not is_odd_prime(p):
        raise ValueError(f"p={p} is not an odd prime")
    if u < 0 or tol <= 0:
        raise ValueError("need u >= 0 and tol > 0")
    if r < 0:
        # convention: cells containing alpha_{p,u,r-1} vanish at r = 0
        return AlphaValue(p, u, r, 0.0, 0.0)
    pref = Fraction(1, p ** (r * (u + r)))
    for i in range(1, r + u + 1):
        pref /= 1 - Fraction(1, p) ** i
    # 0 <= prefactor-bounded tail: true alpha in [V*(1-T), V] with T = p^-N/(p-1)
    prod = Fraction(1)
    n = r + 1
    while True:
        tail = Fraction(1, p ** n * (p - 1))
        if pref * prod * tail < Fraction(tol) / 2:
            break
        prod *= 1 - Fraction(1, p) ** n
        n += 1
    exact = pref * prod
    val = float(exact)
    bound = float(exact * Fraction(1, p ** (n - 1) * (p - 1))) + abs(val) * 1e-15
    return AlphaValue(p, u, r, val, bound)


def alpha_moment_sums(p: int, u: int, r_max: int = 40, tol: float = 1e-12) -> tuple[float, float]:
    """(sum_r alpha, sum_r p^r alpha) truncated at r_max; limits are 1 and 1 + p^-u."""
    s0 = s1 = 0.0
    for r in range(r_max + 1):
        a = alpha(p, u, r, tol).value
        s0 += a
        s1 += p ** r * a
    return s0, s1


def split_probability(p: int) -> Fraction:
    """Density of fundamental discriminants lying in Q_p^x2: p/(2p+2)."""
    if not is_odd_prime(p):
        raise ValueError(f"p={p} is not an odd prime")
    return Fraction(p, 2 * p + 2)


# (u-parameter of alpha_{p,u,r-1} term, u-parameter of alpha_{p,u,r} term)
# for the residue-refined table; None means the cell is a single alpha.
_RESIDUE_CELL = {
    (EVEN_0, REAL): ("shift", 2),
    (EVEN_0, IMAGINARY): ("shift", 1),
    (EVEN_HALF, REAL): ("shift", 2),
    (EVEN_HALF, IMAGINARY): ("shift", 1),
    (EVEN_OTHER, REAL): ("plain", 1),
    (EVEN_OTHER, IMAGINARY): ("plain", 0),
    (ODD_HALF, REAL): ("shift", 1),
    (ODD_HALF, IMAGINARY): ("shift", 2),
    (ODD_OTHER, REAL): ("plain", 0),
    (ODD_OTHER, IMAGINARY): ("plain", 1),
}

_OTHER_ROW = {EVEN_0: EVEN_OTHER, EVEN_HALF: EVEN_OTHER, ODD_HALF: ODD_OTHER}


def condition_weight(p: int, n_class: str) -> Fraction:
    """Density of discriminants satisfying the row's square-class condition."""
    if n_class == EVEN_0:
        return split_probability(p)          # d in Qp^x2
    if n_class in (EVEN_HALF, ODD_HALF):
        return Fraction(1, 2 * p + 2)        # p | d and -d/p a square mod p
    return Fraction(0)


def rank_distribution(selector: FamilySelector, r: int, tol: float = 1e-12) -> float:
    """Prob(dim_{F_p} (K_2n(O_F)/p)^- = r) for the selected family box."""
    if r < 0:
        raise ValueError("r must be >= 0")
    p, row, sign = selector.p, selector.n_class, selector.sign
    cond = selector.local_condition

    def cell(row_: str) -> float:
        kind, uu = _RESIDUE_CELL[(row_, sign)]
        if kind == "shift":
            return alpha(p, uu, r - 1, tol).value
        return alpha(p, uu, r, tol).value

    if cond == COND_COMPLEMENT:
        other = _OTHER_ROW.get(row)
        if other is None:
            raise ValueError(f"row {row!r} carries no condition to complement")
        return cell(other)
    if cond is not None:
        return cell(row)
    # signature-only: weighted combination over the residue refinement
    w = condition_weight(p, row)
    if w == 0:
        return cell(row)
    other = _OTHER_ROW[row]
    return float(w) * cell(row) + float(1 - w) * cell(other)


def distribution_table(selector: FamilySelector, r_max: int = 8, tol: float = 1e-12) -> DistributionTable:
    entries = {r: rank_distribution(selector, r, tol) for r in range(r_max + 1)}
    return DistributionTable(entries=entries, truncation_r=r_max,
                             tail_mass=max(0.0, 1.0 - sum(entries.values())))


def average_table(p: int) -> dict[tuple[str, str], Fraction]:
    """Average order of (K_2n(O_F)/p)^-, signature-only table, exact rationals."""
    if not is_odd_prime(p):
        raise ValueError(f"p={p} is not an odd prime")
    return {
        (EVEN_0, REAL): Fraction(p**3 + p**2 + 4*p + 2, 2*p**2 + 2*p),
        (EVEN_0, IMAGINARY): Fraction(p**2 + 3*p + 4, 2*p + 2),
        (EVEN_HALF, REAL): Fraction(3*p**2 + 3*p + 2, 2*p**2 + 2*p),
        (EVEN_HALF, IMAGINARY): Fraction(5*p + 3, 2*p + 2),
        (EVEN_OTHER, REAL): Fraction(p + 1, p),
        (EVEN_OTHER, IMAGINARY): Fraction(2),
        (ODD_HALF, REAL): Fraction(5*p + 3, 2*p + 2),
        (ODD_HALF, IMAGINARY): Fraction(3*p**2 + 3*p + 2, 2*p**2 + 2*p),
        (ODD_OTHER, REAL): Fraction(2),
        (ODD_OTHER, IMAGINARY): Fraction(p + 1, p),
    }


def class_average_table(p: int) -> dict[tuple[str, str, bool], Fraction]:
    """Average order of the class-group component, keyed by (row, sign, condition holds)."""
    if not is_odd_prime(p):
        raise ValueError(f"p={p} is not an odd prime")
    one_p2 = 1 + Fraction(1, p * p)
    one_p = 1 + Fraction(1, p)
    two = Fraction(2)
    out: dict[tuple[str, str, bool], Fraction] = {}
    for row in (EVEN_0, EVEN_HALF):
        out[(row, REAL, True)] = one_p2
        out[(row, IMAGINARY, True)] = one_p
        out[(row, REAL, False)] = one_p
        out[(row, IMAGINARY, False)] = two
    out[(EVEN_OTHER, REAL, False)] = one_p
    out[(EVEN_OTHER, IMAGINARY, False)] = two
    out[(ODD_HALF, REAL, True)] = one_p
    out[(ODD_HALF, IMAGINARY, True)] = one_p2
    out[(ODD_HALF, REAL, False)] = two
    out[(ODD_HALF, IMAGINARY, False)] = one_p
    out[(ODD_OTHER, REAL, False)] = two
    out[(ODD_OTHER, IMAGINARY, False)] = one_p
    return out


def k_residue_average_table(p: int) -> dict[tuple[str, str, bool], Fraction]:
    """Average order of (K_2n/p)^- in the residue-refined families.

    Equals the class-average cell times p when the Brauer component is
    one-dimensional (the two condition rows), times 1 otherwise.
    """
    out = {}
    for (row, sign, holds), v in class_average_table(p).items():
        brauer = holds and row in (EVEN_0, EVEN_HALF, ODD_HALF)
        out[(row, sign, holds)] = v * (p if brauer else 1)
    return out


def class_average_simplified_p3() -> dict[tuple[str, bool], Fraction]:
    """The p = 3 class-average table by (sign, d_K in Q_3^x2)."""
    return {
        (REAL, True): Fraction(10, 9),
        (REAL, False): Fraction(4, 3),
        (IMAGINARY, True): Fraction(4, 3),
        (IMAGINARY, False): Fraction(2),
    }


def table_rows_json(p: int, table: dict, value_name: str = "value") -> list[dict]:
    """Flatten a table dict into labeled rows for CSV/JSON serialization."""
    rows = []
    for key, val in table.items():
        row: dict = {"p": p}
        if len(key) == 2:
            row["n_class"], row["signature"] = key
        else:
            row["n_class"], row["signature"], row["condition_holds"] = key
        row[value_name] = str(val) if isinstance(val, Fraction) else val
        rows.append(row)
    return rows
