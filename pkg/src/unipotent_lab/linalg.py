"""Small exact linear algebra over F_p: row reduction, solving, spans.

Matrices are lists of row lists of canonical residues.  Everything is
dense and pure Python; the systems in this package are tiny.
"""

from __future__ import annotations


def rref(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form mod p; returns (rows, pivot column list)."""
    rows = [[x % p for x in row] for row in rows]
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(rows: list[list[int]], p: int) -> int:
    return len(rref(rows, p)[1])


def in_span(vectors: list[list[int]], target: list[int], p: int) -> bool:
    """Whether target lies in the F_p-span of the given vectors."""
    if not vectors:
        return all(x % p == 0 for x in target)
    base_rank = rank(vectors, p)
    return rank(vectors + [target], p) == base_rank


def solve(rows: list[list[int]], rhs: list[int], p: int) -> list[int] | None:
    """One solution of rows * x = rhs mod p, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [row + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug, p)
    for row in red:
        if all(x % p == 0 for x in row[:-1]) and row[-1] % p:
            return None
    x = [0] * ncols
    for r, c in enumerate(pivots):
        if c < ncols:
            x[c] = red[r][-1] % p
    return x


class SparseSpan:
    """Incremental F_p span of sparse vectors (dicts column -> value)."""

    def __init__(self, p: int):
        self.p = p
        self.pivots: dict[int, dict[int, int]] = {}

    def _reduce(self, vec: dict[int, int]) -> dict[int, int]:
        p = self.p
        vec = {c: v % p for c, v in vec.items() if v % p}
        while vec:
            lead = min(vec)
            row = self.pivots.get(lead)
            if row is None:
                return vec
            f = vec[lead]
            for c, v in row.items():
                nv = (vec.get(c, 0) - f * v) % p
                if nv:
                    vec[c] = nv
                else:
                    vec.pop(c, None)
        return vec

    def add(self, vec: dict[int, int]) -> bool:
        """Insert a vector; returns True when it enlarged the span."""
        vec = self._reduce(vec)
        if not vec:
            return False
        lead = min(vec)
        inv = pow(vec[lead], -1, self.p)
        self.pivots[lead] = {c: (v * inv) % self.p for c, v in vec.items()}
        return True

    def contains(self, vec: dict[int, int]) -> bool:
        return not self._reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.pivots)


def nullspace(rows: list[list[int]], p: int) -> list[list[int]]:
    """Basis of the kernel of the matrix mod p (free-variable convention)."""
    ncols = len(rows[0]) if rows else 0
    red, pivots = rref(rows, p)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = (-red[r][f]) % p
        basis.append(v)
    return basis
