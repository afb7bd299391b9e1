"""Bounded brute-force searches for (strong) shift equivalence of matrices.

Every search here reports a verified witness or ``None`` meaning "nothing
within these bounds"; ``None`` is never a proof of inequivalence. Candidate
filtering uses numpy on small int64 arrays, and every returned witness is
re-verified with exact Python integers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterator, Sequence

import numpy as np

from .graph import Graph, adjacency_matrix
from .matrix import IntMatrix, permutation_matrix
from .moves import IN_AMALGAMATION, IN_SPLIT, OUT_AMALGAMATION, OUT_SPLIT, MoveError, MoveRecord

# int64 filtering stays exact while products of bounded entries stay below this
_SAFE = 2**40


class SearchBudgetExceeded(RuntimeError):
    """The requested bounds describe a search space larger than the cap."""


@dataclass(frozen=True)
class SsePair:
    """``left = R S`` and ``right = S R``."""

    R: IntMatrix
    S: IntMatrix

    def verifies(self, left: IntMatrix, right: IntMatrix) -> bool:
        try:
            return self.R @ self.S == left and self.S @ self.R == right
        except ValueError:
            return False

    def to_json(self) -> dict:
        return {"R": self.R.tolist(), "S": self.S.tolist()}


@dataclass(frozen=True)
class SeWitness:
    R: IntMatrix
    S: IntMatrix
    lag: int

    def verifies(self, a: IntMatrix, b: IntMatrix) -> bool:
        try:
            return (
                self.lag >= 1
                and a**self.lag == self.R @ self.S
                and b**self.lag == self.S @ self.R
                and a @ self.R == self.R @ b
                and self.S @ a == b @ self.S
            )
        except ValueError:
            return False

    def to_json(self) -> dict:
        return {"R": self.R.tolist(), "S": self.S.tolist(), "lag": self.lag}


def _np(m: IntMatrix) -> np.ndarray:
    if m.max_entry() >= _SAFE:
        raise OverflowError("matrix entries too large for bounded search")
    return np.array(m.tolist(), dtype=np.int64).reshape(m.shape)


def _vectors(length: int, bound: int) -> np.ndarray:
    """All vectors in ``{0..bound}^length``, lexicographic order."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(bound + 1)] * length, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


def _traces_agree(a: IntMatrix, b: IntMatrix, upto: int) -> bool:
    pa, pb = a, b
    for _ in range(upto):
        if pa.trace() != pb.trace():
            return False
        pa, pb = pa @ a, pb @ b
    return True


def factorizations(
    a: IntMatrix, inner: int, bound: int, sorted_columns: bool = False
) -> Iterator[tuple[IntMatrix, IntMatrix]]:
    """All ``(R, S)`` with ``R S = a``, inner dimension ``inner`` and entries <= bound.

    Rows of R and columns of S are drawn from the same candidate vectors;
    the dot-product table between them drives a row-by-row backtrack that
    keeps, for every column of ``a``, the set of still-feasible S columns.
    With ``sorted_columns`` only R with lexicographically nondecreasing
    columns are produced, one per orbit of the inner-index permutations.
    """
    n = a.nrows
    target = _np(a)
    vecs = _vectors(inner, bound)
    dots = vecs @ vecs.T

    def rows(i: int, chosen: list[int], masks: np.ndarray):
        if i == n:
            yield chosen, masks
            return
        # new[r, j, k]: column candidate k for column j survives row choice r
        new = masks[None, :, :] & (dots[:, None, :] == target[i][None, :, None])
        for r in np.flatnonzero(new.any(axis=2).all(axis=1)):
            yield from rows(i + 1, chosen + [int(r)], new[r])

    for chosen, masks in rows(0, [], np.ones((n, len(vecs)), dtype=bool)):
        rmat = vecs[chosen]
        if sorted_columns and inner > 1:
            cols_t = [tuple(c) for c in rmat.T.tolist()]
            if cols_t != sorted(cols_t):
                continue
        R = IntMatrix(rmat.tolist(), ncols=inner)
        cols = [np.flatnonzero(m) for m in masks]
        for pick in product(*cols):
            S = IntMatrix(vecs[list(pick)].T.tolist(), ncols=n)
            yield R, S


def elementary_sse(a: IntMatrix, b: IntMatrix, entry_bound: int = 2, inner_dim_bound: int = 3) -> SsePair | None:
    """A pair with ``a = R S`` and ``b = S R``, searched exhaustively within bounds."""
    if not a.is_square() or not b.is_square():
        raise ValueError("square matrices required")
    m = b.nrows
    if m > inner_dim_bound or not _traces_agree(a, b, max(a.nrows, m)):
        return None
    for R, S in factorizations(a, m, entry_bound):
        if S @ R == b:
            return SsePair(R, S)
    return None


def _canon(m: IntMatrix) -> IntMatrix:
    return m.canonical_form()


def sse_neighbors(a: IntMatrix, entry_bound: int, inner_dim_bound: int) -> Iterator[tuple[IntMatrix, SsePair]]:
    for inner in range(1, inner_dim_bound + 1):
        for R, S in factorizations(a, inner, entry_bound, sorted_columns=True):
            yield S @ R, SsePair(R, S)


def _permutation_step(c: IntMatrix, b: IntMatrix) -> SsePair:
    """``c = P b P^T`` as the elementary pair ``R = P``, ``S = b P^T``."""
    for perm in permutations(range(b.nrows)):
        if b.permuted(perm) == c:
            # b.permuted(perm) = P b P^T with P[i][perm[i]] = 1
            p = permutation_matrix(perm)
            return SsePair(p, b @ p.transpose())
    raise ValueError("matrices are not permutation similar")


def sse_chain(
    a: IntMatrix,
    b: IntMatrix,
    chain_bound: int = 2,
    entry_bound: int = 2,
    inner_dim_bound: int = 3,
    max_states: int = 20000,
) -> list[SsePair] | None:
    """A chain of elementary equivalences from ``a`` to ``b``.

    Breadth-first over matrices, deduplicated by canonical (permutation)
    form. When a state is permutation similar to ``b`` a final permutation
    step, itself an elementary equivalence, is appended; it is not counted
    against ``chain_bound``.
    """
    if a == b:
        return []
    if not _traces_agree(a, b, max(a.nrows, b.nrows)):
        return None
    goal = _canon(b)
    if _canon(a) == goal:
        return [_permutation_step(a, b)]
    parent: dict[IntMatrix, tuple[IntMatrix | None, SsePair | None, IntMatrix]] = {_canon(a): (None, None, a)}
    queue = deque([(a, 0)])
    while queue:
        cur, depth = queue.popleft()
        if depth >= chain_bound:
            continue
        for nxt, pair in sse_neighbors(cur, entry_bound, inner_dim_bound):
            key = _canon(nxt)
            if key in parent:
                continue
            parent[key] = (_canon(cur), pair, nxt)
            if key == goal:
                chain = []
                k = key
                while parent[k][1] is not None:
                    prev, pr, _ = parent[k]
                    chain.append(pr)
                    k = prev
                chain.reverse()
                if nxt != b:
                    chain.append(_permutation_step(nxt, b))
                return chain
            if len(parent) > max_states:
                raise SearchBudgetExceeded(f"more than {max_states} states")
            queue.append((nxt, depth + 1))
    return None


def verify_chain(a: IntMatrix, b: IntMatrix, chain: Sequence[SsePair]) -> bool:
    cur = a
    for pair in chain:
        if pair.R @ pair.S != cur:
            return False
        cur = pair.S @ pair.R
    return cur == b


def chain_to_se(a: IntMatrix, chain: Sequence[SsePair]) -> SeWitness:
    """Compose a chain of length l into a lag-l shift equivalence."""
    if not chain:
        return SeWitness(a, IntMatrix.identity(a.nrows), 1)
    R, S = chain[0].R, chain[0].S
    for pair in chain[1:]:
        R = R @ pair.R
        S = pair.S @ S
    return SeWitness(R, S, len(chain))


def shift_equivalent(
    a: IntMatrix,
    b: IntMatrix,
    lag_bound: int = 2,
    entry_bound: int = 2,
    max_candidates: int = 5_000_000,
) -> SeWitness | None:
    """A lag-l shift equivalence with ``l <= lag_bound`` and entries <= bound.

    For each lag, intertwiners R with ``a R = R b`` are filtered first; S is
    then solved column by column from ``R S = a^l``.
    """
    if not a.is_square() or not b.is_square():
        raise ValueError("square matrices required")
    n, m = a.nrows, b.nrows
    total = (entry_bound + 1) ** (n * m)
    if total > max_candidates:
        raise SearchBudgetExceeded(f"{total} candidate R matrices exceed the cap {max_candidates}")
    A, B = _np(a), _np(b)
    intertwiners = []
    vecs = _vectors(n * m, entry_bound)
    for chunk in np.array_split(vecs, max(1, len(vecs) // 200_000)):
        Rs = chunk.reshape(-1, n, m)
        ok = np.all(np.einsum("ik,tkj->tij", A, Rs) == np.einsum("tik,kj->tij", Rs, B), axis=(1, 2))
        intertwiners.extend(Rs[ok])
    svecs = _vectors(m, entry_bound)
    for lag in range(1, lag_bound + 1):
        al, bl = a**lag, b**lag
        Al = _np(al)
        for Rn in intertwiners:
            prods = svecs @ Rn.T  # row t: R @ svecs[t]
            cols = []
            for j in range(n):
                hits = np.flatnonzero(np.all(prods == Al[:, j], axis=1))
                if not len(hits):
                    break
                cols.append(hits)
            else:
                R = IntMatrix(Rn.tolist(), ncols=m)
                for pick in product(*cols):
                    S = IntMatrix(svecs[list(pick)].T.tolist(), ncols=n)
                    if S @ R == bl and S @ a == b @ S:
                        return SeWitness(R, S, lag)
    return None


# -- moves as matrices ----------------------------------------------------
def _index(g: Graph) -> dict[int, int]:
    return {v: i for i, v in enumerate(g.vertices)}


def move_to_matrices(record: MoveRecord, g_before: Graph, g_after: Graph) -> SsePair:
    """The division/amalgamation pair with ``A_before = R S`` and ``A_after = S R``."""
    a0, a1 = adjacency_matrix(g_before), adjacency_matrix(g_after)
    i0, i1 = _index(g_before), _index(g_after)
    n0, n1 = len(i0), len(i1)
    vmap = record.vertex_map()
    try:
        if record.kind in (IN_SPLIT, OUT_SPLIT):
            # 0/1 matrix sending each original vertex to its copies
            copy = [[0] * n1 for _ in range(n0)]
            for v, cps in vmap.items():
                for c in cps:
                    copy[i0[v]][i1[c]] = 1
            first = {v: cps[0] for v, cps in vmap.items()}
            if record.kind == IN_SPLIT:
                R = IntMatrix([[a1[i1[first[g]], h] for h in range(n1)] for g in g_before.vertices], ncols=n1)
                S = IntMatrix(copy, ncols=n1).transpose()
            else:
                R = IntMatrix(copy, ncols=n1)
                S = IntMatrix([[a1[h, i1[first[g]]] for g in g_before.vertices] for h in range(n1)], ncols=n0)
        elif record.kind in (IN_AMALGAMATION, OUT_AMALGAMATION):
            merge = [[0] * n1 for _ in range(n0)]
            for v, (w,) in vmap.items():
                merge[i0[v]][i1[w]] = 1
            M = IntMatrix(merge, ncols=n1)
            if record.kind == IN_AMALGAMATION:
                R = M
                S = IntMatrix([[a0[i0[w], j] for j in range(n0)] for w in g_after.vertices], ncols=n0)
            else:
                R = IntMatrix([[a0[i, i0[w]] for w in g_after.vertices] for i in range(n0)], ncols=n1)
                S = M.transpose()
        else:
            raise MoveError(f"unknown move kind {record.kind!r}")
    except KeyError as exc:
        raise MoveError(f"record does not match the graphs: missing id {exc}") from exc
    pair = SsePair(R, S)
    if not pair.verifies(a0, a1):
        raise MoveError("record is inconsistent with the given graphs")
    return pair
