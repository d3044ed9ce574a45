"""Exact linear algebra over fractions.

Small dense systems only: reachability equations, stationary distributions and
the spanning basis of the automata equivalence check.
"""

from collections.abc import Hashable, Mapping, Sequence
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def solve_linear(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve matrix @ x = rhs by Gauss-Jordan elimination; the matrix must be non-singular."""
    n = len(matrix)
    rows = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise ValueError(f"singular system, no pivot in column {col}")
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
        p = rows[col][col]
        if p != 1:
            rows[col] = [v / p for v in rows[col]]
        for r in range(n):
            if r == col:
                continue
            factor = rows[r][col]
            if factor == 0:
                continue
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][n] for i in range(n)]


def stationary_distribution(
    states: Sequence[Hashable], transitions: Mapping[Hashable, Mapping[Hashable, Fraction]]
) -> dict:
    """Unique stationary distribution of an irreducible closed chain: pi P = pi, sum pi = 1."""
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    # column j of the transposed system: sum_i pi_i P[i][j] - pi_j = 0
    matrix = [[ZERO] * n for _ in range(n)]
    for i, s in enumerate(states):
        for t, p in transitions.get(s, {}).items():
            if t in index:
                matrix[index[t]][i] += p
    for j in range(n):
        matrix[j][j] -= ONE
    matrix[n - 1] = [ONE] * n
    rhs = [ZERO] * (n - 1) + [ONE]
    solution = solve_linear(matrix, rhs)
    return {s: solution[i] for i, s in enumerate(states)}


class Basis:
    """Row-reduced set of linearly independent vectors, grown one vector at a time."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []
        self.originals: list[list[Fraction]] = []

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vector: Sequence[Fraction]) -> list[Fraction]:
        residual = list(vector)
        for row, pivot in zip(self.rows, self.pivots):
            factor = residual[pivot]
            if factor != 0:
                residual = [a - factor * b for a, b in zip(residual, row)]
        return residual

    def add(self, vector: Sequence[Fraction]) -> bool:
        """Add vector if it is independent of the basis; returns whether it was added."""
        residual = self.reduce(vector)
        pivot = next((i for i, v in enumerate(residual) if v != 0), None)
        if pivot is None:
            return False
        p = residual[pivot]
        residual = [v / p for v in residual]
        # keep earlier rows reduced in the new pivot column
        for k, row in enumerate(self.rows):
            factor = row[pivot]
            if factor != 0:
                self.rows[k] = [a - factor * b for a, b in zip(row, residual)]
        self.rows.append(residual)
        self.pivots.append(pivot)
        self.originals.append(list(vector))
        return True


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), ZERO)
