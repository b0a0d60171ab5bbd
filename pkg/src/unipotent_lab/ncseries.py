"""Degree-truncated non-commutative power series and Magnus expansions.

A series in d variables is stored sparsely as a map from multi-indices
(tuples of generator indices in 1..d) to canonical coefficients; zero
coefficients are never stored and monomials above the cutoff degree are
discarded.  The Magnus expansion sends the free-group generator x_i to
1 + X_i, with inverse letters handled by the truncated geometric series
and exponents by repeated squaring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import BadWord, NotAUnit, SpecMismatch
from .residue import RingElem, RingSpec

if TYPE_CHECKING:
    from .freewords import Word

MultiIndex = tuple[int, ...]


def check_index(I: Iterable[int], d: int) -> MultiIndex:
    I = tuple(I)
    if any(not (1 <= i <= d) for i in I):
        raise BadWord(f"multi-index {I} exceeds height {d}")
    return I


@dataclass(frozen=True)
class NCSeries:
    """Truncated series; coeffs maps multi-index -> canonical nonzero int."""

    d: int
    cutoff: int
    spec: RingSpec
    coeffs: Mapping[MultiIndex, int] = field(default_factory=dict)

    @classmethod
    def build(cls, d: int, cutoff: int, spec: RingSpec,
              coeffs: Mapping[MultiIndex, int]) -> "NCSeries":
        clean: dict[MultiIndex, int] = {}
        for I, c in coeffs.items():
            if len(I) > cutoff:
                continue
            c = spec.reduce_int(c)
            if c != 0:
                clean[check_index(I, d)] = c
        return cls(d, cutoff, spec, clean)

    @classmethod
    def one(cls, d: int, cutoff: int, spec: RingSpec) -> "NCSeries":
        return cls(d, cutoff, spec, {(): 1})

    @classmethod
    def generator(cls, i: int, d: int, cutoff: int, spec: RingSpec) -> "NCSeries":
        """The Magnus image 1 + X_i of the i-th generator."""
        if not (1 <= i <= d):
            raise BadWord(f"generator index {i} out of range 1..{d}")
        coeffs = {(): 1}
        if cutoff >= 1:
            coeffs[(i,)] = spec.reduce_int(1)
        return cls(d, cutoff, spec, coeffs)

    def coeff(self, I: Iterable[int]) -> int:
        return self.coeffs.get(tuple(I), 0)

    def terms(self) -> list[tuple[MultiIndex, int]]:
        """Terms sorted by (degree, lexicographic index)."""
        return sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NCSeries):
            return NotImplemented
        return (self.d, self.cutoff, self.spec) == (other.d, other.cutoff, other.spec) \
            and dict(self.coeffs) == dict(other.coeffs)

    def __hash__(self):
        return hash((self.d, self.cutoff, self.spec, frozenset(self.coeffs.items())))


def _check_shapes(a: NCSeries, b: NCSeries) -> None:
    if (a.d, a.cutoff, a.spec) != (b.d, b.cutoff, b.spec):
        raise SpecMismatch(
            f"series shapes differ: ({a.d},{a.cutoff},{a.spec}) vs ({b.d},{b.cutoff},{b.spec})")


def nc_add(a: NCSeries, b: NCSeries) -> NCSeries:
    _check_shapes(a, b)
    out = dict(a.coeffs)
    red = a.spec.reduce_int
    for I, c in b.coeffs.items():
        v = red(out.get(I, 0) + c)
        if v:
            out[I] = v
        else:
            out.pop(I, None)
    return NCSeries(a.d, a.cutoff, a.spec, out)


def nc_scale(a: NCSeries, k: int) -> NCSeries:
    red = a.spec.reduce_int
    k = red(k)
    out = {}
    for I, c in a.coeffs.items():
        v = red(c * k)
        if v:
            out[I] = v
    return NCSeries(a.d, a.cutoff, a.spec, out)


def nc_mul(a: NCSeries, b: NCSeries) -> NCSeries:
    """Cauchy product: the I-coefficient is the sum over splittings I = I1 I2."""
    _check_shapes(a, b)
    cutoff = a.cutoff
    red = a.spec.reduce_int
    out: dict[MultiIndex, int] = {}
    for I1, c1 in a.coeffs.items():
        room = cutoff - len(I1)
        for I2, c2 in b.coeffs.items():
            if len(I2) > room:
                continue
            I = I1 + I2
            v = out.get(I, 0) + c1 * c2
            out[I] = v
    clean = {}
    for I, v in out.items():
        v = red(v)
        if v:
            clean[I] = v
    return NCSeries(a.d, a.cutoff, a.spec, clean)


def nc_invert(a: NCSeries) -> NCSeries:
    """Two-sided inverse up to the cutoff, via the truncated geometric series.

    Requires the constant term to be a unit of the coefficient ring.
    """
    c0 = a.coeff(())
    if not a.spec.is_unit(c0):
        raise NotAUnit(f"constant term {c0} is not a unit in {a.spec}")
    u = a.spec.inv(c0)
    # a = c0 (1 + N) with N of positive degree; a^-1 = u * sum (-N)^k.
    neg_n = nc_scale(nc_add(nc_scale(a, u), nc_scale(NCSeries.one(a.d, a.cutoff, a.spec), -1)), -1)
    acc = NCSeries.one(a.d, a.cutoff, a.spec)
    term = NCSeries.one(a.d, a.cutoff, a.spec)
    for _ in range(a.cutoff):
        term = nc_mul(term, neg_n)
        if not term.coeffs:
            break
        acc = nc_add(acc, term)
    return nc_scale(acc, u)


def nc_pow(a: NCSeries, e: int) -> NCSeries:
    """a^e by repeated squaring; negative exponents invert first."""
    if e < 0:
        return nc_pow(nc_invert(a), -e)
    result = NCSeries.one(a.d, a.cutoff, a.spec)
    base = a
    while e:
        if e & 1:
            result = nc_mul(result, base)
        base = nc_mul(base, base) if e > 1 else base
        e >>= 1
    return result


def magnus(w: "Word", spec: RingSpec, cutoff: int, d: int | None = None) -> NCSeries:
    """Magnus expansion of a reduced word under x_i -> 1 + X_i."""
    if d is None:
        d = w.d
    out = NCSeries.one(d, cutoff, spec)
    for gen, exp in w.letters:
        if gen > d:
            raise BadWord(f"word uses generator x{gen} beyond d={d}")
        out = nc_mul(out, nc_pow(NCSeries.generator(gen, d, cutoff, spec), exp))
    return out


def epsilon(w: "Word", I: Iterable[int], spec: RingSpec) -> RingElem:
    """The coefficient of X_I in the Magnus expansion of w."""
    I = tuple(I)
    d = max([w.d, *I], default=w.d)
    series = magnus(w, spec, cutoff=len(I), d=d)
    return RingElem(spec, series.coeff(I))


def dump(a: NCSeries) -> str:
    """Text form with terms sorted by (degree, lex), e.g. ``1 + 1*X1 + 2*X1X2``."""
    parts = []
    for I, c in a.terms():
        if not I:
            parts.append(str(c))
        else:
            parts.append(f"{c}*" + "".join(f"X{i}" for i in I))
    return " + ".join(parts) if parts else "0"
