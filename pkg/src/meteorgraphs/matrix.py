"""Nonnegative integer matrices with exact (arbitrary precision) arithmetic."""

from __future__ import annotations

from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

# int64 products are exact while every partial sum stays below this
_INT64_SAFE = 2**62


class IntMatrix:
    """Row-major nonnegative integer matrix.

    Entries are Python ints, so products and powers never overflow.
    Zero-row/zero-column shapes are allowed (``IntMatrix([], ncols=0)``).
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Sequence[int]], ncols: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
            if any(x < 0 for x in r):
                raise ValueError("matrix entries must be nonnegative")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def zeros(cls, n: int, m: int) -> "IntMatrix":
        return cls([[0] * m for _ in range(n)], ncols=m)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.ncols and self.max_entry() * other.max_entry() * self.ncols < _INT64_SAFE:
            a = np.array(self.rows, dtype=np.int64).reshape(self.shape)
            b = np.array(other.rows, dtype=np.int64).reshape(other.shape)
            return IntMatrix((a @ b).tolist(), ncols=other.ncols)
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows],
            ncols=other.ncols,
        )

    def __pow__(self, k: int) -> "IntMatrix":
        if not self.is_square() or k < 0:
            raise ValueError("power needs a square matrix and k >= 0")
        result = IntMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self.rows), ncols=self.nrows) if self.nrows else IntMatrix.zeros(self.ncols, 0)

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(min(self.shape)))

    def max_entry(self) -> int:
        return max((x for r in self.rows for x in r), default=0)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def permuted(self, perm: Sequence[int]) -> "IntMatrix":
        """Simultaneous row/column permutation: entry (i, j) <- (perm[i], perm[j])."""
        return IntMatrix([[self.rows[a][b] for b in perm] for a in perm], ncols=self.ncols)

    def canonical_form(self) -> "IntMatrix":
        """Lexicographically least simultaneous permutation (exhaustive; n <= 7)."""
        if not self.is_square():
            raise ValueError("canonical form needs a square matrix")
        best = None
        for perm in permutations(range(self.nrows)):
            cand = tuple(self.rows[a][b] for a in perm for b in perm)
            if best is None or cand < best[0]:
                best = (cand, perm)
        if best is None:
            return self
        return self.permuted(best[1])

    def canonical_permutation(self) -> tuple[int, ...]:
        best = None
        for perm in permutations(range(self.nrows)):
            cand = tuple(self.rows[a][b] for a in perm for b in perm)
            if best is None or cand < best[0]:
                best = (cand, perm)
        return best[1] if best else ()


def permutation_matrix(perm: Sequence[int]) -> IntMatrix:
    """P with P[i][perm[i]] = 1, so P @ M @ P.T == M.permuted(perm)."""
    n = len(perm)
    return IntMatrix([[int(perm[i] == j) for j in range(n)] for i in range(n)], ncols=n)
