"""Free-group words, filtration membership oracles and witness representations.

Membership in the three descending series of a free group is decided from
Magnus coefficients:

* lower central series: all coefficients of degree < n vanish over Z;
* Zassenhaus filtration: they vanish over F_p;
* descending p-central series: the p-valuation of the degree-k coefficient
  is at least n - k (decidable mod p^n, since the threshold is < n).

When membership fails, ``witness_rep`` returns the first multi-index (by
degree, then lexicographic order) with a surviving coefficient together
with the coefficient matrix representation sending the word to a
non-identity unipotent matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import ncseries
from .config import Caps, DEFAULT_CAPS
from .errors import BadParams, BadWord, NoWitness, TooLarge
from .ncseries import MultiIndex, NCSeries
from .residue import RingSpec, is_prime, val_p
from .unimat import UniMat

LOWER_CENTRAL = "lower-central"
ZASSENHAUS = "zassenhaus"
P_CENTRAL = "p-central"

_KINDS = (LOWER_CENTRAL, ZASSENHAUS, P_CENTRAL)


@dataclass(frozen=True)
class Word:
    """Reduced word over generators x1..xd with nonzero integer exponents."""

    d: int
    letters: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_letters(cls, d: int, letters) -> "Word":
        reduced: list[list[int]] = []
        for gen, exp in letters:
            if not (1 <= gen <= d):
                raise BadWord(f"generator index {gen} out of range 1..{d}")
            if exp == 0:
                continue
            if reduced and reduced[-1][0] == gen:
                reduced[-1][1] += exp
                if reduced[-1][1] == 0:
                    reduced.pop()
            else:
                reduced.append([gen, exp])
        return cls(d, tuple((g, e) for g, e in reduced))

    @classmethod
    def identity(cls, d: int) -> "Word":
        return cls(d, ())

    @classmethod
    def gen(cls, i: int, d: int) -> "Word":
        return cls.from_letters(d, [(i, 1)])

    def __mul__(self, other: "Word") -> "Word":
        if self.d != other.d:
            raise BadWord(f"rank mismatch: {self.d} vs {other.d}")
        return Word.from_letters(self.d, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word.from_letters(self.d, [(g, -e) for g, e in reversed(self.letters)])

    def power(self, n: int) -> "Word":
        if n == 0:
            return Word.identity(self.d)
        base = self if n > 0 else self.inverse()
        out = Word.identity(self.d)
        for _ in range(abs(n)):
            out = out * base
        return out

    def commutator(self, other: "Word") -> "Word":
        """[u, v] = u^-1 v^-1 u v."""
        return self.inverse() * other.inverse() * self * other

    def is_identity(self) -> bool:
        return not self.letters

    def length(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def max_gen(self) -> int:
        return max((g for g, _ in self.letters), default=0)

    def __str__(self) -> str:
        return format_word(self)


def format_word(w: Word) -> str:
    if not w.letters:
        return "e"
    parts = []
    for g, e in w.letters:
        parts.append(f"x{g}" if e == 1 else f"x{g}^{e}")
    return "*".join(parts)


class _WordParser:
    """Recursive-descent parser for ``x1*x2^-1*[x1,x2]^2`` style words."""

    def __init__(self, text: str, d: int):
        self.text = "".join(text.split())
        self.pos = 0
        self.d = d

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, msg: str):
        raise BadWord(f"{msg} at position {self.pos} in {self.text!r}")

    def parse(self) -> Word:
        w = self.expr()
        if self.pos != len(self.text):
            self.fail("trailing input")
        return w

    def expr(self) -> Word:
        w = self.term()
        while self.peek() == "*":
            self.pos += 1
            w = w * self.term()
        return w

    def term(self) -> Word:
        w = self.atom()
        if self.peek() == "^":
            self.pos += 1
            w = w.power(self.integer())
        return w

    def atom(self) -> Word:
        c = self.peek()
        if c == "e":
            self.pos += 1
            return Word.identity(self.d)
        if c == "x":
            self.pos += 1
            return Word.gen(self.number(), self.d)
        if c == "[":
            self.pos += 1
            u = self.expr()
            if self.peek() != ",":
                self.fail("expected ','")
            self.pos += 1
            v = self.expr()
            if self.peek() != "]":
                self.fail("expected ']'")
            self.pos += 1
            return u.commutator(v)
        if c == "(":
            self.pos += 1
            w = self.expr()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.pos += 1
            return w
        self.fail("expected atom")

    def number(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected number")
        return int(self.text[start:self.pos])

    def integer(self) -> int:
        sign = 1
        if self.peek() == "-":
            sign = -1
            self.pos += 1
        return sign * self.number()


def parse_word(text: str, d: int | None = None) -> Word:
    """Parse the word grammar; with d=None the rank is the largest index used."""
    if d is None:
        probe = _WordParser(text, 10 ** 9).parse()
        d = max(probe.max_gen(), 1)
        return Word.from_letters(d, probe.letters)
    return _WordParser(text, d).parse()


@dataclass(frozen=True)
class Filtration:
    """Which descending series, plus the prime for the p-dependent ones."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise BadParams(f"unknown filtration kind {self.kind!r}")
        if self.kind == LOWER_CENTRAL:
            if self.p is not None:
                raise BadParams("lower central series takes no prime")
        else:
            if self.p is None or not is_prime(self.p):
                raise BadParams(f"{self.kind} needs a prime, got {self.p}")

    def __str__(self) -> str:
        return self.kind if self.p is None else f"{self.kind}(p={self.p})"


@dataclass(frozen=True)
class WitnessRep:
    """A multi-index I and the matrix rho_I(w) certifying non-membership."""

    index: MultiIndex
    spec: RingSpec
    matrix: UniMat

    @property
    def size(self) -> int:
        return len(self.index) + 1

    @property
    def corner(self) -> int:
        return self.matrix.entry(1, self.size)


def _check_caps(w: Word, n: int, caps: Caps) -> None:
    if n < 1:
        raise BadParams(f"level must be >= 1, got {n}")
    if n > caps.max_level:
        raise TooLarge(f"level {n} exceeds cap {caps.max_level}")
    if w.length() > caps.max_word_length:
        raise TooLarge(f"word length {w.length()} exceeds cap {caps.max_word_length}")


@lru_cache(maxsize=8192)
def _magnus_table(w: Word, spec: RingSpec, cutoff: int, d: int) -> NCSeries:
    # Witness searches and rho constructions reread the same expansion
    # many times over; the table is immutable, so share it.
    return ncseries.magnus(w, spec, cutoff, d)


def _coefficient_table(w: Word, filt: Filtration, n: int) -> NCSeries:
    """Magnus table sufficient to decide membership at level n.

    Lower central works over exact integers.  Zassenhaus needs F_p.  The
    p-central criterion compares valuations below n, so Z/p^n suffices.
    """
    if filt.kind == LOWER_CENTRAL:
        spec = RingSpec.integers()
    elif filt.kind == ZASSENHAUS:
        spec = RingSpec.prime_field(filt.p)
    else:
        spec = RingSpec.mod_prime_power(filt.p, n)
    return _magnus_table(w, spec, n - 1, w.d)


def in_filtration(w: Word, filt: Filtration, n: int, caps: Caps = DEFAULT_CAPS) -> bool:
    """Membership of w in the level-n term of the chosen series."""
    _check_caps(w, n, caps)
    if n == 1:
        return True
    table = _coefficient_table(w, filt, n)
    if filt.kind == P_CENTRAL:
        p = filt.p
        for I, c in table.coeffs.items():
            if I and val_p(c, p) < n - len(I):
                return False
        return True
    return all(not I for I in table.coeffs)


def rho_I(w: Word, I: MultiIndex, spec: RingSpec) -> UniMat:
    """Coefficient representation: entry (mu, nu) is the Magnus coefficient
    of the sub-index (i_mu, ..., i_{nu-1}); unitriangular of size |I|+1."""
    I = tuple(I)
    if not I:
        raise BadParams("rho_I needs a nonempty multi-index")
    k = len(I)
    d = max(w.d, max(I))
    table = _magnus_table(w, spec, k, d)
    return _rho_from_table(table, I, spec)


def _rho_from_table(table: NCSeries, I: MultiIndex, spec: RingSpec) -> UniMat:
    k = len(I)
    rows = []
    for mu in range(1, k + 2):
        row = []
        for nu in range(1, k + 2):
            if nu < mu:
                row.append(0)
            elif nu == mu:
                row.append(1)
            else:
                row.append(spec.reduce_int(table.coeff(I[mu - 1:nu - 1])))
        rows.append(tuple(row))
    return UniMat(k + 1, spec, tuple(rows))


def witness_rep(w: Word, filt: Filtration, n: int, caps: Caps = DEFAULT_CAPS) -> WitnessRep:
    """First (by degree, then lex) witness that w is outside level n.

    Raises NoWitness when w is a member; that outcome is part of the
    contract, not a failure.
    """
    _check_caps(w, n, caps)
    d = max(w.d, 1)
    if n >= 2:
        table = _coefficient_table(w, filt, n)
        for k in range(1, n):
            for I in itertools.product(range(1, d + 1), repeat=k):
                c = table.coeff(I)
                if c == 0:
                    continue
                if filt.kind == ZASSENHAUS:
                    spec = RingSpec.prime_field(filt.p)
                    return WitnessRep(I, spec, _rho_from_table(table, I, spec))
                if filt.kind == LOWER_CENTRAL:
                    spec = RingSpec.integers()
                    return WitnessRep(I, spec, _rho_from_table(table, I, spec))
                if val_p(c, filt.p) < n - k:
                    spec = RingSpec.mod_prime_power(filt.p, n - k)
                    reduced = NCSeries.build(table.d, table.cutoff, spec, table.coeffs)
                    return WitnessRep(I, spec, _rho_from_table(reduced, I, spec))
    raise NoWitness(f"{w} lies in level {n} of {filt}")
