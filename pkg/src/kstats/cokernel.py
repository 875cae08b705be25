"""Random-matrix laboratory over F_p: exact cokernel dimensions and seeded simulation.

The simulation draws uniform m x (m+u) matrices from a counter-based
splitmix64 stream and tallies dim coker.  Stream-splitting rule: sample i
uses the sub-stream with initial state seed + (i+1)*GOLDEN (mod 2^64),
advanced by GOLDEN per output word.  Because every sample owns its own
stream, partitioning samples across workers cannot change any result:
reports are bit-identical for any thread count.

For p = 3 entries are drawn as bitplane pairs (two stream words per
64-column block, rejection on the (1,1) bit pattern); for other p each
entry is one stream word reduced mod p, row-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import is_odd_prime
from .heuristics import alpha

GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class MatrixModP:
    """An m x (m+u) matrix over F_p, entries reduced to [0, p)."""
    p: int
    entries: np.ndarray

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p={self.p} is not an odd prime")
        e = np.asarray(self.entries, dtype=np.int64)
        if e.ndim != 2:
            raise ValueError("entries must be 2-dimensional")
        if ((e < 0) | (e >= self.p)).any():
            raise ValueError("entries must lie in [0, p)")
        object.__setattr__(self, "entries", e)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def u(self) -> int:
        return self.entries.shape[1] - self.entries.shape[0]


def cokernel_dim(mat: MatrixModP) -> int:
    """dim_{F_p} coker = m - rank, by Gaussian elimination with modular inverses."""
    A = mat.entries % mat.p
    p = mat.p
    m, n = A.shape
    rank = 0
    for col in range(n):
        piv = None
        for i in range(rank, m):
            if A[i, col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        A[rank] = (A[rank] * pow(int(A[rank, col]), -1, p)) % p
        rows = A[rank + 1:, col] != 0
        if rows.any():
            A[rank + 1:][rows] = (A[rank + 1:][rows] - np.outer(A[rank + 1:, col][rows], A[rank])) % p
        rank += 1
        if rank == m:
            break
    return m - rank


def random_matrix(p: int, m: int, u: int, seed: int, index: int = 0) -> MatrixModP:
    """The matrix that sample `index` of simulate(p, u, m, ..., seed) sees."""
    n = m + u
    if p == 3:
        entries = _matrix_from_planes_py(seed, index, m, n)
    else:
        state = (seed + (index + 1) * GOLDEN) & _MASK64
        entries = np.empty((m, n), dtype=np.int64)
        for i in range(m):
            for j in range(n):
                state = (state + GOLDEN) & _MASK64
                entries[i, j] = _mix64(state) % p
    return MatrixModP(p, entries)


def _matrix_from_planes_py(seed: int, index: int, m: int, n: int) -> np.ndarray:
    """Reference bitplane stream for p = 3 (mirrored by the compiled kernel)."""
    state = (seed + (index + 1) * GOLDEN) & _MASK64
    W = (n + 63) >> 6
    A = np.empty((m, n), dtype=np.int64)
    for i in range(m):
        for w in range(W):
            lo = hi = 0
            need = _MASK64 if not (w == W - 1 and n & 63) else (1 << (n & 63)) - 1
            while need:
                state = (state + GOLDEN) & _MASK64
                w1 = _mix64(state)
                state = (state + GOLDEN) & _MASK64
                w2 = _mix64(state)
                lo |= need & w1 & ~w2
                hi |= need & w2 & ~w1
                need &= w1 & w2
            for b in range(min(64, n - 64 * w)):
                A[i, 64 * w + b] = (lo >> b) & 1 | ((hi >> b) & 1) << 1
    return A


def iter_all_matrices(p: int, m: int, u: int):
    """Every matrix in F_p^{m x (m+u)}, as a mixed-radix counter. p^(m(m+u)) of them."""
    n = m + u
    cells = m * n
    if p ** cells > 10_000_000:
        raise ValueError(f"{p}^{cells} matrices is too many to enumerate")
    digits = np.zeros(cells, dtype=np.int64)
    while True:
        yield MatrixModP(p, digits.reshape(m, n).copy())
        k = 0
        while k < cells:
            digits[k] += 1
            if digits[k] < p:
                break
            digits[k] = 0
            k += 1
        if k == cells:
            return


def rank_count_exact(p: int, m: int, n: int, k: int) -> int:
    """Number of m x n matrices over F_p of rank k (product formula, exact)."""
    if k < 0 or k > min(m, n):
        return 0
    num = 1
    for i in range(k):
        num *= (p ** m - p ** i) * (p ** n - p ** i)
    den = 1
    for i in range(k):
        den *= p ** k - p ** i
    return num // den


@dataclass
class SimulationReport:
    p: int
    u: int
    m: int
    samples: int
    seed: int | None
    exhaustive: bool
    counts: list[int]
    reference: list[float]
    max_abs_deviation: float
    engine: str = "python"

    @property
    def probabilities(self) -> list[float]:
        return [c / self.samples for c in self.counts]

    def to_json(self) -> dict:
        return {
            "p": self.p, "u": self.u, "m": self.m,
            "samples": self.samples, "seed": self.seed,
            "exhaustive": self.exhaustive,
            "counts": self.counts,
            "probabilities": self.probabilities,
            "reference_alpha": self.reference,
            "max_abs_deviation": self.max_abs_deviation,
        }


_KERNELS: dict = {}


def _load_kernels():
    """JIT-compiled engines; imported lazily so a broken numba degrades to python."""
    if _KERNELS:
        return _KERNELS
    try:
        from . import _coker_kernels as k
        _KERNELS["p3"] = k.simulate_p3
        _KERNELS["generic"] = k.simulate_generic
    except Exception:
        _KERNELS["p3"] = None
        _KERNELS["generic"] = None
    return _KERNELS


def simulate(p: int, u: int, m: int, samples: int, seed: int,
             threads: int = 1, exhaustive: bool = False,
             engine: str = "auto") -> SimulationReport:
    """Empirical distribution of dim coker for `samples` seeded random matrices.

    With exhaustive=True, runs over all p^(m(m+u)) matrices instead
    (samples and seed are ignored).  threads only partitions work; it can
    never change the report.
    """
    if not is_odd_prime(p):
        raise ValueError(f"p={p} is not an odd prime")
    if m < 0 or u < 0:
        raise ValueError("need m, u >= 0")
    counts = np.zeros(m + 1, dtype=np.int64)
    if exhaustive:
        total = 0
        for mat in iter_all_matrices(p, m, u):
            counts[cokernel_dim(mat)] += 1
            total += 1
        used = "exhaustive"
        n_samples = total
    else:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        kern = _load_kernels()
        if engine == "python" or (engine == "auto" and kern["p3"] is None):
            for i in range(samples):
                counts[cokernel_dim(random_matrix(p, m, u, seed, i))] += 1
            used = "python"
        else:
            if threads > 1:
                import numba
                old = numba.get_num_threads()
                numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
            try:
                if p == 3:
                    dims = kern["p3"](u, m, samples, np.uint64(seed & _MASK64))
                    used = "bitplane-f3"
                else:
                    dims = kern["generic"](p, u, m, samples, np.uint64(seed & _MASK64))
                    used = "generic"
            finally:
                if threads > 1:
                    numba.set_num_threads(old)
            counts += np.bincount(dims, minlength=m + 1).astype(np.int64)
        n_samples = samples
    ref = [alpha(p, u, r).value for r in range(m + 1)]
    emp = counts / max(n_samples, 1)
    dev = float(np.abs(emp - np.array(ref)).max())
    return SimulationReport(p=p, u=u, m=m, samples=int(n_samples),
                            seed=None if exhaustive else seed,
                            exhaustive=exhaustive,
                            counts=[int(c) for c in counts],
                            reference=ref, max_abs_deviation=dev, engine=used)
