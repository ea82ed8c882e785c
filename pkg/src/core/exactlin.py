"""
Exact Integer Linear Algebra Module

This module provides arbitrary-precision integer linear algebra on dense
matrices: Hermite and Smith normal forms, saturated kernels, cokernels as
finitely generated abelian groups, and maximal minors.

Matrices are numpy arrays of dtype ``object`` holding Python integers, so no
operation can overflow.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import InvariantViolation

logger = logging.getLogger(__name__)

IntMatrix = np.ndarray
MatrixLike = Union[np.ndarray, Sequence[Sequence[int]]]

# Above this many column subsets gcd_maximal_minors reads the determinantal
# divisor off the Smith form instead of enumerating.
MINOR_ENUMERATION_LIMIT = 20000


def as_int_matrix(data: MatrixLike, cols: Optional[int] = None) -> IntMatrix:
    """
    Convert nested sequences to an object-dtype integer matrix.

    Args:
        data: Nested rows of integers or an existing array
        cols: Column count to use when ``data`` has no rows

    Returns:
        Two-dimensional numpy array with Python ``int`` entries
    """
    if isinstance(data, np.ndarray) and data.ndim == 2:
        out = np.empty(data.shape, dtype=object)
        for idx, x in np.ndenumerate(data):
            out[idx] = int(x)
        return out
    rows = [[int(x) for x in row] for row in data]
    if not rows:
        return np.zeros((0, cols or 0), dtype=object)
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ValueError("ragged matrix rows")
    out = np.empty((len(rows), width), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def identity(n: int) -> IntMatrix:
    """n x n identity matrix with Python int entries."""
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(rows: int, cols: int) -> IntMatrix:
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def to_lists(A: MatrixLike) -> List[List[int]]:
    """Plain nested lists of ints, e.g. for JSON output or sorting keys."""
    A = as_int_matrix(A)
    return [[int(x) for x in row] for row in A]


def matmul(A: MatrixLike, B: MatrixLike) -> IntMatrix:
    A = as_int_matrix(A)
    B = as_int_matrix(B)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    out = zeros(A.shape[0], B.shape[1])
    if A.shape[1] == 0:
        return out
    return A.dot(B) + out


def block_diagonal(blocks: Iterable[MatrixLike]) -> IntMatrix:
    mats = [as_int_matrix(b) for b in blocks]
    out = zeros(sum(m.shape[0] for m in mats), sum(m.shape[1] for m in mats))
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def exgcd(a: int, b: int) -> Tuple[int, int, int]:
    """
    Extended Euclid.

    Returns:
        (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0
    """
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class AbelianGroup:
    """
    Finitely generated abelian group Z^rank + Z/t_1 + ... + Z/t_k.

    Attributes:
        rank: Free rank
        torsion: Invariant factors, each >= 2 and dividing the next
    """

    rank: int
    torsion: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'torsion', tuple(int(t) for t in self.torsion))
        if self.rank < 0:
            raise ValueError("negative rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} not a divisibility chain")
        if any(t < 2 for t in self.torsion):
            raise ValueError("invariant factors must be >= 2")

    @classmethod
    def from_invariants(cls, rank: int, factors: Iterable[int]) -> 'AbelianGroup':
        """Build from free rank and raw invariant factors (ones are dropped)."""
        return cls(rank, tuple(abs(f) for f in factors if abs(f) > 1))

    @property
    def torsion_order(self) -> int:
        return math.prod(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def order(self) -> Optional[int]:
        """Group order, or None when the group is infinite."""
        return self.torsion_order if self.is_finite else None

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z/{t}Z" for t in self.torsion)
        return " x ".join(parts) if parts else "0"


@dataclass(frozen=True)
class SmithForm:
    """
    Smith normal form U*A*V = diag(d).

    Attributes:
        d: Diagonal entries, nonnegative, d_i divides d_{i+1}
        U: Unimodular row transform
        V: Unimodular column transform
    """

    d: Tuple[int, ...]
    U: IntMatrix
    V: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x != 0)

    @property
    def nonzero(self) -> Tuple[int, ...]:
        return tuple(x for x in self.d if x != 0)


def hnf(A: MatrixLike, return_transform: bool = False):
    """
    Column-style Hermite normal form.

    H = A*U with U unimodular. Pivot rows strictly increase with the column
    index, pivots are positive, entries left of a pivot lie in [0, pivot),
    and all zero columns come last.

    Args:
        A: Integer matrix
        return_transform: Also return U

    Returns:
        H, or (H, U) if return_transform is set
    """
    H = as_int_matrix(A)
    m, n = H.shape
    U = identity(n)
    k = 0
    for i in range(m):
        if k == n:
            break
        for j in range(k + 1, n):
            b = H[i, j]
            if b == 0:
                continue
            a = H[i, k]
            g, s, t = exgcd(a, b)
            ca, cb = -b // g, a // g
            hk, hj = H[:, k].copy(), H[:, j].copy()
            H[:, k] = s * hk + t * hj
            H[:, j] = ca * hk + cb * hj
            uk, uj = U[:, k].copy(), U[:, j].copy()
            U[:, k] = s * uk + t * uj
            U[:, j] = ca * uk + cb * uj
        p = H[i, k]
        if p == 0:
            continue
        if p < 0:
            H[:, k] = -H[:, k]
            U[:, k] = -U[:, k]
            p = -p
        for j in range(k):
            q = H[i, j] // p
            if q:
                H[:, j] = H[:, j] - q * H[:, k]
                U[:, j] = U[:, j] - q * U[:, k]
        k += 1
    if return_transform:
        return H, U
    return H


def _pivot_rows(H: IntMatrix) -> List[int]:
    """Row index of each pivot of a column-style HNF, in column order."""
    rows = []
    m, n = H.shape
    i = 0
    for k in range(n):
        while i < m and H[i, k] == 0:
            i += 1
        if i == m:
            break
        rows.append(i)
        i += 1
    return rows


def is_hnf(H: MatrixLike) -> bool:
    """Whether H satisfies the column-style Hermite normal form conditions of ``hnf``."""
    H = as_int_matrix(H)
    rows = _pivot_rows(H)
    for k, i in enumerate(rows):
        p = H[i, k]
        if p <= 0 or any(H[i0, k] != 0 for i0 in range(i)):
            return False
        if any(not 0 <= H[i, j] < p for j in range(k)):
            return False
    return all(H[i, j] == 0 for i in range(H.shape[0]) for j in range(len(rows), H.shape[1]))


def snf(A: MatrixLike) -> SmithForm:
    """
    Smith normal form with transforms.

    Pivots on the entry of least absolute value; a non-divisible entry is
    folded into the pivot row until the pivot divides the whole block.
    """
    A0 = as_int_matrix(A)
    D = A0.copy()
    m, n = D.shape
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        if i != j:
            D[[i, j]] = D[[j, i]]
            U[[i, j]] = U[[j, i]]

    def swap_cols(i, j):
        if i != j:
            D[:, [i, j]] = D[:, [j, i]]
            V[:, [i, j]] = V[:, [j, i]]

    for t in range(min(m, n)):
        entries = [(abs(D[i, j]), i, j) for i in range(t, m) for j in range(t, n) if D[i, j] != 0]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            p = D[t, t]
            for i in range(t + 1, m):
                q = D[i, t] // p
                if q:
                    D[i] = D[i] - q * D[t]
                    U[i] = U[i] - q * U[t]
            for j in range(t + 1, n):
                q = D[t, j] // p
                if q:
                    D[:, j] = D[:, j] - q * D[:, t]
                    V[:, j] = V[:, j] - q * V[:, t]
            rest = [(abs(D[i, t]), i, t) for i in range(t + 1, m) if D[i, t] != 0]
            rest += [(abs(D[t, j]), t, j) for j in range(t + 1, n) if D[t, j] != 0]
            if rest:
                _, i1, j1 = min(rest)
                swap_rows(t, i1)
                swap_cols(t, j1)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i, j] % p),
                None,
            )
            if bad is None:
                break
            D[t] = D[t] + D[bad]
            U[t] = U[t] + U[bad]
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]

    d = tuple(int(D[i, i]) for i in range(min(m, n)))
    if (matmul(matmul(U, A0), V) != D).any():
        raise InvariantViolation("Smith transform does not reproduce the diagonal form", A0)
    return SmithForm(d, U, V)


def rank(A: MatrixLike) -> int:
    """Rank over Q."""
    H = hnf(A)
    return len(_pivot_rows(H))


def kernel_basis(A: MatrixLike) -> IntMatrix:
    """
    Saturated basis of the integer kernel {x : A*x = 0}.

    Returns:
        Matrix whose columns form a lattice basis of the kernel
    """
    H, U = hnf(A, return_transform=True)
    k = len(_pivot_rows(H))
    return U[:, k:].copy()


def cokernel(A: MatrixLike) -> AbelianGroup:
    """Structure of Z^rows / (column image of A)."""
    A = as_int_matrix(A)
    form = snf(A)
    return AbelianGroup.from_invariants(A.shape[0] - form.rank, form.nonzero)


def determinant(A: MatrixLike) -> int:
    """Fraction-free Bareiss determinant of a square matrix."""
    M = [list(row) for row in to_lists(A)]
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def maximal_minors(A: MatrixLike) -> Tuple[int, ...]:
    """
    Absolute values of all maximal minors.

    Subsets of the longer dimension are taken in lexicographic order, so the
    output order is deterministic. Zeros are kept.
    """
    A = as_int_matrix(A)
    m, n = A.shape
    if m > n:
        A = A.T
        m, n = n, m
    return tuple(abs(determinant(A[:, list(cols)])) for cols in combinations(range(n), m))


def gcd_maximal_minors(A: MatrixLike, limit: int = MINOR_ENUMERATION_LIMIT) -> int:
    """
    gcd of the maximal minors; 0 when all of them vanish.

    Enumerates when there are at most ``limit`` subsets and otherwise uses
    the determinantal divisor from the Smith form.
    """
    A = as_int_matrix(A)
    m, n = A.shape
    k = min(m, n)
    if math.comb(max(m, n), k) <= limit:
        return reduce(math.gcd, maximal_minors(A), 0)
    form = snf(A)
    if form.rank < k:
        return 0
    return math.prod(form.d)


def solve_exact(A: MatrixLike, B: MatrixLike) -> IntMatrix:
    """
    Integer solution X of A*X = B.

    Raises:
        InvariantViolation: If no integral solution exists
    """
    A = as_int_matrix(A)
    B = as_int_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"row mismatch {A.shape} vs {B.shape}")
    H, U = hnf(A, return_transform=True)
    pivots = _pivot_rows(H)
    Y = zeros(A.shape[1], B.shape[1])
    for c, row in enumerate(pivots):
        for col in range(B.shape[1]):
            acc = B[row, col] - sum(H[row, j] * Y[j, col] for j in range(c))
            q, rem = divmod(acc, H[row, c])
            if rem:
                raise InvariantViolation("linear system has no integral solution", (A, B))
            Y[c, col] = q
    if (matmul(H, Y) != B).any():
        raise InvariantViolation("linear system is inconsistent", (A, B))
    return matmul(U, Y)


def saturation_basis(A: MatrixLike) -> IntMatrix:
    """
    HNF basis of (column span of A over Q) intersected with Z^rows.
    """
    A = as_int_matrix(A)
    m = A.shape[0]
    annihilator = kernel_basis(A.T)
    sat = kernel_basis(annihilator.T)
    if sat.shape[0] != m:
        raise InvariantViolation("saturation basis has the wrong ambient rank", A)
    H = hnf(sat)
    return H[:, :len(_pivot_rows(H))].copy()


__all__ = [
    'IntMatrix',
    'MINOR_ENUMERATION_LIMIT',
    'AbelianGroup',
    'SmithForm',
    'as_int_matrix',
    'identity',
    'zeros',
    'to_lists',
    'matmul',
    'block_diagonal',
    'exgcd',
    'hnf',
    'is_hnf',
    'snf',
    'rank',
    'kernel_basis',
    'cokernel',
    'determinant',
    'maximal_minors',
    'gcd_maximal_minors',
    'solve_exact',
    'saturation_basis',
]
