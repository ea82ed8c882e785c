"""
Exact Cone Tests Module

Decides whether finitely many integer vectors generate Q^d as a convex cone.
That holds iff the vectors have rank d and some strictly positive combination
of them vanishes; the second condition is an LP feasibility question, solved
here with an exact phase-one simplex over Fractions using Bland's rule.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

from src.core.exactlin import MatrixLike, as_int_matrix, rank

logger = logging.getLogger(__name__)


class PhaseOneSimplex:
    """
    Feasibility of {x >= 0 : A x = b} by minimizing the sum of artificials.

    Rows with negative right-hand side are negated first, so the artificial
    basis is feasible from the start.
    """

    def __init__(self, A: Sequence[Sequence[int]], b: Sequence[int]):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        self.rows: List[List[Fraction]] = []
        for i in range(self.m):
            sign = -1 if b[i] < 0 else 1
            row = [Fraction(sign * a) for a in A[i]]
            row += [Fraction(1 if k == i else 0) for k in range(self.m)]
            row.append(Fraction(sign * b[i]))
            self.rows.append(row)
        self.basis = [self.n + i for i in range(self.m)]
        width = self.n + self.m
        # reduced costs of the phase-one objective, rhs last
        self.cost = [Fraction(0)] * (width + 1)
        for row in self.rows:
            for j in range(self.n):
                self.cost[j] -= row[j]
            self.cost[width] -= row[width]

    def pivot(self, i: int, j: int) -> None:
        piv = self.rows[i][j]
        self.rows[i] = [v / piv for v in self.rows[i]]
        for k in range(self.m):
            if k != i and self.rows[k][j] != 0:
                f = self.rows[k][j]
                self.rows[k] = [a - f * p for a, p in zip(self.rows[k], self.rows[i])]
        f = self.cost[j]
        if f != 0:
            self.cost = [a - f * p for a, p in zip(self.cost, self.rows[i])]
        self.basis[i] = j

    def bland_step(self) -> Optional[str]:
        width = self.n + self.m
        entering = next((j for j in range(width) if self.cost[j] < 0), None)
        if entering is None:
            return 'optimal'
        candidates = [
            (self.rows[i][width] / self.rows[i][entering], self.basis[i], i)
            for i in range(self.m)
            if self.rows[i][entering] > 0
        ]
        if not candidates:
            return 'unbounded'
        _, _, leaving = min(candidates)
        self.pivot(leaving, entering)
        return None

    def feasible(self) -> bool:
        while True:
            status = self.bland_step()
            if status == 'optimal':
                break
            if status == 'unbounded':
                # cannot happen: the phase-one objective is bounded below by 0
                return False
        return self.cost[self.n + self.m] == 0


def positively_spans(vectors: MatrixLike, dim: int) -> bool:
    """
    Check whether the columns of ``vectors`` generate Q^dim as a cone.

    Args:
        vectors: dim x k integer matrix, one generator per column
        dim: Ambient dimension

    Returns:
        True iff cone(columns) = Q^dim
    """
    V = as_int_matrix(vectors, cols=0)
    if dim == 0:
        return True
    if V.shape[0] != dim or V.shape[1] == 0:
        return False
    if rank(V) < dim:
        return False
    # x = 1 + y with y >= 0 and V y = -V 1
    A = [[int(V[i, j]) for j in range(V.shape[1])] for i in range(dim)]
    b = [-sum(row) for row in A]
    result = PhaseOneSimplex(A, b).feasible()
    logger.debug(f"cone spanning test on {V.shape[1]} rays in dim {dim}: {result}")
    return result


__all__ = ['PhaseOneSimplex', 'positively_spans']
