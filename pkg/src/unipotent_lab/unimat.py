"""Unipotent matrix algebra over the residue rings.

The module covers the nilpotent shift matrix X (ones on the
superdiagonal), the truncated polynomial algebra K[X] with X^n = 0, the
construction of a conjugator A with A X A^-1 = X f(X) from a unit f, the
conjugation solvers for A B A^-1 = B^(1+p^k) and the p = 2 variants, group
order computation, centralizers, top-left embeddings and the quotient by
the corner center.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import linalg
from .errors import (
    BadParams,
    BadSize,
    BadTarget,
    NoFiniteOrder,
    NotAUnit,
    SpecMismatch,
)
from .residue import RingSpec

Rows = tuple[tuple[int, ...], ...]


def mat_identity(n: int) -> Rows:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_shift(n: int) -> Rows:
    """The shift matrix X: ones at (i, i+1), zero elsewhere."""
    return tuple(tuple(1 if j == i + 1 else 0 for j in range(n)) for i in range(n))


def mat_mul(a: Rows, b: Rows, modulus: int | None) -> Rows:
    bt = tuple(zip(*b))
    if modulus is None:
        return tuple(
            tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
        )
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) % modulus for col in bt) for row in a
    )


def mat_add(a: Rows, b: Rows, modulus: int | None) -> Rows:
    if modulus is None:
        return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
    return tuple(tuple((x + y) % modulus for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Rows, k: int, modulus: int | None) -> Rows:
    if modulus is None:
        return tuple(tuple(k * x for x in row) for row in a)
    return tuple(tuple((k * x) % modulus for x in row) for row in a)


def mat_reduce(a: Rows, modulus: int | None) -> Rows:
    if modulus is None:
        return tuple(tuple(row) for row in a)
    return tuple(tuple(x % modulus for x in row) for row in a)


def unitriangular_inverse(a: Rows, modulus: int | None) -> Rows:
    """Exact inverse of 1 + N via the finite Neumann sum of (-N)^k."""
    n = len(a)
    neg_n = mat_scale(mat_add(a, mat_scale(mat_identity(n), -1, modulus), modulus), -1, modulus)
    acc = mat_identity(n)
    term = mat_identity(n)
    for _ in range(n - 1):
        term = mat_mul(term, neg_n, modulus)
        acc = mat_add(acc, term, modulus)
    return acc


@dataclass(frozen=True)
class UniMat:
    """Upper unitriangular matrix with entries canonical in its ring."""

    n: int
    spec: RingSpec
    rows: Rows

    def __post_init__(self):
        if len(self.rows) != self.n or any(len(r) != self.n for r in self.rows):
            raise BadSize(f"expected {self.n}x{self.n} rows")
        for i in range(self.n):
            if self.rows[i][i] != 1:
                raise BadParams("diagonal must be all 1")
            for j in range(i):
                if self.rows[i][j] != 0:
                    raise BadParams("strictly lower entries must vanish")

    @classmethod
    def identity(cls, n: int, spec: RingSpec) -> "UniMat":
        return cls(n, spec, mat_identity(n))

    @classmethod
    def from_rows(cls, rows, spec: RingSpec) -> "UniMat":
        rows = mat_reduce(tuple(tuple(r) for r in rows), spec.modulus)
        return cls(len(rows), spec, rows)

    @classmethod
    def one_plus_shift(cls, n: int, spec: RingSpec) -> "UniMat":
        """B = 1 + X."""
        return cls.from_rows(mat_add(mat_identity(n), mat_shift(n), spec.modulus), spec)

    @classmethod
    def elementary(cls, n: int, i: int, j: int, spec: RingSpec, value: int = 1) -> "UniMat":
        """1 + value * e_{ij} for i < j (1-based)."""
        if not (1 <= i < j <= n):
            raise BadParams(f"need 1 <= i < j <= {n}")
        rows = [list(row) for row in mat_identity(n)]
        rows[i - 1][j - 1] = spec.reduce_int(value)
        return cls(n, spec, tuple(tuple(r) for r in rows))

    def entry(self, i: int, j: int) -> int:
        """1-based entry access."""
        return self.rows[i - 1][j - 1]

    def _check(self, other: "UniMat") -> None:
        if (self.n, self.spec) != (other.n, other.spec):
            raise SpecMismatch(f"({self.n},{self.spec}) vs ({other.n},{other.spec})")

    def __mul__(self, other: "UniMat") -> "UniMat":
        self._check(other)
        return UniMat(self.n, self.spec, mat_mul(self.rows, other.rows, self.spec.modulus))

    def inverse(self) -> "UniMat":
        return UniMat(self.n, self.spec, unitriangular_inverse(self.rows, self.spec.modulus))

    def __pow__(self, e: int) -> "UniMat":
        if e < 0:
            return self.inverse() ** (-e)
        result = UniMat.identity(self.n, self.spec)
        base = self
        while e:
            if e & 1:
                result = result * base
            if e > 1:
                base = base * base
            e >>= 1
        return result

    def is_identity(self) -> bool:
        return self.rows == mat_identity(self.n)

    def order(self) -> int:
        """Least m >= 1 with self^m = 1; a p-power for the finite rings."""
        if self.is_identity():
            return 1
        if not self.spec.is_finite:
            raise NoFiniteOrder("non-identity unipotent matrix over Z has infinite order")
        p = self.spec.p
        current = self
        m = 1
        # Unipotent groups over Z/p^r are p-groups, so the order is the
        # first p-power that kills the matrix.
        for _ in range(64):
            current = current ** p
            m *= p
            if current.is_identity():
                return m
        raise BadParams("order search did not terminate; non-unipotent input?")

    def conjugate_by(self, a: "UniMat") -> "UniMat":
        return a * self * a.inverse()

    def to_text(self) -> str:
        return ";".join(",".join(str(x) for x in row) for row in self.rows)

    @classmethod
    def from_text(cls, text: str, spec: RingSpec) -> "UniMat":
        rows = tuple(
            tuple(int(x) for x in line.split(",")) for line in text.strip().split(";")
        )
        return cls.from_rows(rows, spec)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class BarUniMat:
    """Element of U_{n+1}/Z_{n+1}: the (1, n+1) entry is quotiented away.

    Stored as the representative with corner 0; multiplication re-zeroes
    the corner, which is exactly the quotient group law.
    """

    n: int
    spec: RingSpec
    rows: Rows

    @classmethod
    def from_unimat(cls, m: UniMat) -> "BarUniMat":
        rows = [list(r) for r in m.rows]
        rows[0][m.n - 1] = 0
        return cls(m.n, m.spec, tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int, spec: RingSpec) -> "BarUniMat":
        return cls(n, spec, mat_identity(n))

    def __mul__(self, other: "BarUniMat") -> "BarUniMat":
        if (self.n, self.spec) != (other.n, other.spec):
            raise SpecMismatch("bar matrix shape mismatch")
        rows = [list(r) for r in mat_mul(self.rows, other.rows, self.spec.modulus)]
        rows[0][self.n - 1] = 0
        return BarUniMat(self.n, self.spec, tuple(tuple(r) for r in rows))

    def __pow__(self, e: int) -> "BarUniMat":
        if e < 0:
            rep = UniMat(self.n, self.spec, self.rows).inverse()
            return BarUniMat.from_unimat(rep) ** (-e)
        result = BarUniMat.identity(self.n, self.spec)
        base = self
        while e:
            if e & 1:
                result = result * base
            if e > 1:
                base = base * base
            e >>= 1
        return result

    def entry(self, i: int, j: int) -> int:
        return self.rows[i - 1][j - 1]

    def is_identity(self) -> bool:
        return self.rows == mat_identity(self.n)

    def to_text(self) -> str:
        return ";".join(",".join(str(x) for x in row) for row in self.rows)


def bar_project(m: UniMat) -> BarUniMat:
    """Quotient map U_{n+1} -> U_{n+1}/Z_{n+1}; kernel is the corner center."""
    return BarUniMat.from_unimat(m)


def embed_top_left(m: UniMat, n: int) -> UniMat:
    """Homomorphic embedding of U_{k+1} into U_n as the top-left block."""
    if m.n > n:
        raise BadSize(f"cannot embed size {m.n} into size {n}")
    rows = [list(row) for row in mat_identity(n)]
    for i in range(m.n):
        for j in range(m.n):
            rows[i][j] = m.rows[i][j]
    return UniMat(n, m.spec, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class KXElem:
    """Element of K[X] with X^n = 0, as the coefficient vector of 1, X, ..., X^{n-1}."""

    n: int
    spec: RingSpec
    coeffs: tuple[int, ...]

    @classmethod
    def from_coeffs(cls, coeffs, n: int, spec: RingSpec) -> "KXElem":
        coeffs = list(coeffs)[:n]
        coeffs += [0] * (n - len(coeffs))
        return cls(n, spec, tuple(spec.reduce_int(c) for c in coeffs))

    @classmethod
    def one(cls, n: int, spec: RingSpec) -> "KXElem":
        return cls.from_coeffs([1], n, spec)

    @classmethod
    def x(cls, n: int, spec: RingSpec) -> "KXElem":
        return cls.from_coeffs([0, 1], n, spec)

    def __add__(self, other: "KXElem") -> "KXElem":
        if (self.n, self.spec) != (other.n, other.spec):
            raise SpecMismatch("K[X] shape mismatch")
        return KXElem.from_coeffs(
            [a + b for a, b in zip(self.coeffs, other.coeffs)], self.n, self.spec)

    def __mul__(self, other: "KXElem") -> "KXElem":
        if (self.n, self.spec) != (other.n, other.spec):
            raise SpecMismatch("K[X] shape mismatch")
        out = [0] * self.n
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j >= self.n:
                    break
                out[i + j] += a * b
        return KXElem.from_coeffs(out, self.n, self.spec)

    def __pow__(self, e: int) -> "KXElem":
        if e < 0:
            return self.inverse() ** (-e)
        result = KXElem.one(self.n, self.spec)
        base = self
        while e:
            if e & 1:
                result = result * base
            if e > 1:
                base = base * base
            e >>= 1
        return result

    def is_unit(self) -> bool:
        """A truncated polynomial is a unit iff its constant term is one."""
        return self.spec.is_unit(self.coeffs[0])

    def inverse(self) -> "KXElem":
        """Geometric series: with u*f = 1 + N, f^-1 = u * sum (-N)^k."""
        if not self.is_unit():
            raise NotAUnit(f"{self} has non-unit constant term")
        u = self.spec.inv(self.coeffs[0])
        scaled = KXElem.from_coeffs([u * c for c in self.coeffs], self.n, self.spec)
        neg = list(scaled.coeffs)
        neg[0] -= 1
        neg_n = KXElem.from_coeffs([-c for c in neg], self.n, self.spec)
        acc = KXElem.one(self.n, self.spec)
        term = KXElem.one(self.n, self.spec)
        for _ in range(self.n - 1):
            term = term * neg_n
            acc = acc + term
        return KXElem.from_coeffs([u * c for c in acc.coeffs], self.n, self.spec)

    def matrix(self) -> Rows:
        """The matrix sum c_i X^i (upper triangular Toeplitz)."""
        n = self.n
        return tuple(
            tuple(self.coeffs[j - i] if j >= i else 0 for j in range(n))
            for i in range(n)
        )

    def __str__(self) -> str:
        return " + ".join(
            f"{c}*X^{i}" for i, c in enumerate(self.coeffs) if c
        ) or "0"


def kx_eval(coeffs, n: int, spec: RingSpec) -> KXElem:
    return KXElem.from_coeffs(coeffs, n, spec)


def kx_is_unit(f: KXElem) -> bool:
    return f.is_unit()


def centralizer_of_X(n: int, p: int) -> list[Rows]:
    """Basis of {M : MX = XM} in Mat_n(F_p), solved as a linear system."""
    spec = RingSpec.prime_field(p)
    x = mat_shift(n)
    # Unknowns: the n^2 entries of M, row-major.  Each equation is one
    # entry of MX - XM.
    equations: list[list[int]] = []
    for i in range(n):
        for j in range(n):
            row = [0] * (n * n)
            # (MX)_{ij} = sum_k M_{ik} X_{kj}
            for k in range(n):
                if x[k][j]:
                    row[i * n + k] += x[k][j]
            # -(XM)_{ij} = -sum_k X_{ik} M_{kj}
            for k in range(n):
                if x[i][k]:
                    row[k * n + j] -= x[i][k]
            if any(v % p for v in row):
                equations.append([v % p for v in row])
    basis_vecs = linalg.nullspace(equations, p)
    return [
        tuple(tuple(v[i * n + j] for j in range(n)) for i in range(n))
        for v in basis_vecs
    ]


def conjugator_rows(f: KXElem) -> Rows:
    """Upper triangular A with A X A^-1 = X f(X), normalized last column.

    Built column by column: with the basis v_i satisfying X v_1 = 0 and
    X v_i = v_{i-1}, column i of A is f(X)^{n-i} v_i, so entry (j, i) is
    the coefficient of X^{i-j} in f(X)^{n-i}.
    """
    if not f.is_unit():
        raise NotAUnit("conjugator construction needs a unit f")
    n = f.n
    col_coeffs: dict[int, tuple[int, ...]] = {}
    for i in range(n, 0, -1):
        col_coeffs[i] = (f ** (n - i)).coeffs
    rows = tuple(
        tuple(
            col_coeffs[i + 1][(i + 1) - (j + 1)] if i >= j else 0
            for i in range(n)
        )
        for j in range(n)
    )
    return rows


def conjugator_from_automorphism(f: KXElem) -> UniMat:
    """The unique normalized conjugator as a unipotent matrix.

    Requires f to have constant term 1 (every solver in this package
    does); for general unit f use conjugator_rows, whose result is upper
    triangular but not unipotent.
    """
    if f.coeffs[0] != 1:
        raise BadParams("unipotent conjugator needs constant term 1")
    return UniMat.from_rows(conjugator_rows(f), f.spec)


TARGET_POWER = "power"
TARGET_NEGPOWER = "negpower"
TARGET_INVERSE = "inverse"


@dataclass(frozen=True)
class Conjugation:
    """Solution of A B A^-1 = B^t for B = 1 + X in U_{p^s+1}(F_p)."""

    target: str
    p: int
    s: int
    k: int | None
    n: int
    A: UniMat
    B: UniMat

    @property
    def power(self) -> int:
        """The exponent t with A B A^-1 = B^t."""
        if self.target == TARGET_POWER:
            return 1 + self.p ** self.k
        if self.target == TARGET_NEGPOWER:
            return -(1 + 2 ** self.k)
        return -1


def solve_conjugation(target: str, p: int, s: int, k: int | None = None) -> Conjugation:
    """Construct the unique normalized A in U_{p^s+1}(F_p) conjugating
    B = 1+X to the requested power of B."""
    if target not in (TARGET_POWER, TARGET_NEGPOWER, TARGET_INVERSE):
        raise BadTarget(f"unknown target {target!r}")
    if target in (TARGET_NEGPOWER, TARGET_INVERSE) and p != 2:
        raise BadTarget(f"{target} requires p = 2")
    if target in (TARGET_POWER, TARGET_NEGPOWER):
        if k is None or k < 1:
            raise BadTarget(f"{target} requires k >= 1")
    if s < 1:
        raise BadParams(f"s must be >= 1, got {s}")
    spec = RingSpec.prime_field(p)
    n = p ** s + 1
    one = KXElem.one(n, spec)
    x = KXElem.x(n, spec)
    if target == TARGET_POWER:
        q = p ** k
        f = one + x ** (q - 1) + x ** q
    elif target == TARGET_NEGPOWER:
        q = 2 ** k
        f = (one + x ** (q - 1) + x ** q) * (one + x).inverse() ** (1 + q)
    else:
        f = (one + x).inverse()
    a = conjugator_from_automorphism(f)
    b = UniMat.one_plus_shift(n, spec)
    return Conjugation(target, p, s, k, n, a, b)


def exhaustive_unipotent(n: int, p: int):
    """All of U_n(F_p) by direct entry enumeration (tiny n only)."""
    spec = RingSpec.prime_field(p)
    positions = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for values in itertools.product(range(p), repeat=len(positions)):
        rows = [list(row) for row in mat_identity(n)]
        for (i, j), v in zip(positions, values):
            rows[i][j] = v
        yield UniMat(n, spec, tuple(tuple(r) for r in rows))
