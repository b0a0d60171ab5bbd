"""Finite group engine: closures, filtration series, hom enumeration.

Groups are element lists closed under a supplied multiplication, built
breadth-first from generators so element order (and everything derived
from it) is deterministic.  Elements are plain hashable values: matrix
groups use row tuples, parametric families use integer tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .config import Caps, DEFAULT_CAPS
from .errors import BadParams, TooLarge
from .freewords import LOWER_CENTRAL, P_CENTRAL, ZASSENHAUS, Word, parse_word
from .residue import RingSpec, is_prime
from .unimat import mat_identity, mat_mul, unitriangular_inverse


@dataclass
class FinGroup:
    """A finite group realized by explicit elements and a composition rule."""

    elements: list
    mul: Callable
    inv: Callable
    identity: object
    gens: list
    name: str = "group"
    derivation: list = field(default_factory=list, repr=False)
    fmt: Callable = str

    @classmethod
    def generate(cls, gens: Sequence, mul: Callable, inv: Callable, identity,
                 cap: int = DEFAULT_CAPS.max_group_size, name: str = "group",
                 fmt: Callable = str) -> "FinGroup":
        """Breadth-first closure of the generators; deterministic order."""
        elements = [identity]
        index = {identity: 0}
        derivation: list = [None]
        frontier = [identity]
        while frontier:
            new_frontier = []
            for g in frontier:
                gi_base = index[g]
                for gi, s in enumerate(gens):
                    h = mul(g, s)
                    if h not in index:
                        index[h] = len(elements)
                        elements.append(h)
                        derivation.append((gi_base, gi))
                        new_frontier.append(h)
                        if len(elements) > cap:
                            raise TooLarge(
                                f"closure exceeds cap {cap} elements")
            frontier = new_frontier
        return cls(elements, mul, inv, identity, list(gens), name, derivation, fmt)

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def power(self, g, e: int):
        if e < 0:
            return self.power(self.inv(g), -e)
        out = self.identity
        base = g
        while e:
            if e & 1:
                out = self.mul(out, base)
            if e > 1:
                base = self.mul(base, base)
            e >>= 1
        return out

    def commutator(self, a, b):
        return self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))

    def element_order(self, g) -> int:
        n = 1
        cur = g
        while cur != self.identity:
            cur = self.mul(cur, g)
            n += 1
        return n

    def exponent(self) -> int:
        return math.lcm(*(self.element_order(g) for g in self.elements))

    def is_abelian(self) -> bool:
        return all(self.mul(a, b) == self.mul(b, a)
                   for a in self.gens for b in self.gens)

    def subgroup_closure(self, seeds: Iterable, cap: int | None = None) -> frozenset:
        """Subgroup generated by the seed elements (plain closure)."""
        seeds = sorted({s for s in seeds}, key=lambda v: self.index[v])
        cap = cap if cap is not None else self.order
        out = {self.identity}
        frontier = [self.identity]
        while frontier:
            new_frontier = []
            for g in frontier:
                for s in seeds:
                    h = self.mul(g, s)
                    if h not in out:
                        out.add(h)
                        new_frontier.append(h)
                        if len(out) > cap:
                            raise TooLarge("subgroup closure exceeded cap")
            frontier = new_frontier
        return frozenset(out)

    def small_generating_set(self, subset: frozenset) -> list:
        """A short generating list for a subgroup given as an element set."""
        if subset == self.element_set:
            return list(self.gens)
        gens: list = []
        have = {self.identity}
        for e in sorted(subset, key=lambda v: self.index[v]):
            if e not in have:
                gens.append(e)
                have = self.subgroup_closure(gens)
        return gens

    def conjugation_orbit(self, x, by_gens: list) -> set:
        """Orbit of x under conjugation by the subgroup the list generates."""
        pairs = [(g, self.inv(g)) for g in by_gens]
        orbit = {x}
        frontier = [x]
        while frontier:
            new = []
            for y in frontier:
                for g, gi in pairs:
                    z = self.mul(self.mul(gi, y), g)
                    if z not in orbit:
                        orbit.add(z)
                        new.append(z)
            frontier = new
        return orbit

    @cached_property
    def _full_commutator_values(self) -> frozenset:
        """All [x, y] over G x G; cached because two series kinds need it."""
        return frozenset(_commutators_raw(self, self.element_set, self.element_set))

    def mul_table(self, cap_entries: int = 4_000_000) -> list[list[int]]:
        n = self.order
        if n * n > cap_entries:
            raise TooLarge(f"multiplication table would need {n * n} entries")
        idx = self.index
        return [[idx[self.mul(a, b)] for b in self.elements] for a in self.elements]

    def inv_table(self) -> list[int]:
        idx = self.index
        return [idx[self.inv(a)] for a in self.elements]


def trivial_group() -> FinGroup:
    return FinGroup.generate([], lambda a, b: 0, lambda a: 0, 0, name="trivial")


def cyclic_group(m: int) -> FinGroup:
    """Z/m, written additively; the generator is 1."""
    if m < 1:
        raise BadParams("cyclic order must be >= 1")
    gens = [1] if m > 1 else []
    return FinGroup.generate(
        gens, lambda a, b: (a + b) % m, lambda a: (-a) % m, 0, name=f"cyclic:{m}")


def abelian_group(orders: Sequence[int]) -> FinGroup:
    """Direct product of cyclic groups, as integer tuples."""
    orders = tuple(orders)
    if not orders or any(m < 1 for m in orders):
        raise BadParams("component orders must be >= 1")
    identity = (0,) * len(orders)

    def mul(a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, orders))

    def inv(a):
        return tuple((-x) % m for x, m in zip(a, orders))

    gens = []
    for i, m in enumerate(orders):
        if m > 1:
            gens.append(tuple(1 if j == i else 0 for j in range(len(orders))))
    name = "abelian:" + ",".join(str(m) for m in orders)
    return FinGroup.generate(gens, mul, inv, identity, name=name)


def unitriangular_group(n: int, spec: RingSpec,
                        caps: Caps = DEFAULT_CAPS) -> FinGroup:
    """U_n over F_p or Z/p^r, generated by the superdiagonal elementaries.

    Elements are raw row tuples; use the unimat text format to print.
    """
    if not spec.is_finite:
        raise BadParams("finite unitriangular groups need a finite ring")
    expected = spec.p ** (spec.r * n * (n - 1) // 2)
    if expected > caps.max_group_size:
        raise TooLarge(
            f"|U_{n}({spec})| = {expected} exceeds cap {caps.max_group_size}")
    m = spec.modulus
    gens = []
    for i in range(n - 1):
        rows = [list(row) for row in mat_identity(n)]
        rows[i][i + 1] = 1
        gens.append(tuple(tuple(r) for r in rows))

    def mul(a, b):
        return mat_mul(a, b, m)

    def inv(a):
        return unitriangular_inverse(a, m)

    grp = FinGroup.generate(
        gens, mul, inv, mat_identity(n), cap=caps.max_group_size,
        name=f"unitriangular:n={n},ring={spec}",
        fmt=lambda rows: ";".join(",".join(str(x) for x in row) for row in rows))
    if grp.order != expected:
        raise BadParams(
            f"generators produced {grp.order} elements, expected {expected}")
    return grp


@dataclass(frozen=True)
class SeriesTable:
    """Levels of one descending series, stored until stabilization."""

    kind: str
    p: int | None
    levels: tuple[frozenset, ...]
    stabilized: bool

    def level(self, n: int) -> frozenset:
        if n < 1:
            raise BadParams("levels start at 1")
        if n <= len(self.levels):
            return self.levels[n - 1]
        if self.stabilized:
            return self.levels[-1]
        raise BadParams(f"series only computed to level {len(self.levels)}")

    def orders(self) -> list[int]:
        return [len(s) for s in self.levels]

    def is_trivial_at(self, n: int) -> bool:
        return len(self.level(n)) == 1


def _powers(G: FinGroup, subset: Iterable, p: int) -> set:
    return {G.power(x, p) for x in subset}


def _commutators_raw(G: FinGroup, a: frozenset, b: frozenset) -> set:
    """The exact set {[x, y] : x in a, y in b} for subgroups a, b.

    Since [x, y] = x^-1 (y^-1 x y), the values for fixed x are x^-1 times
    the conjugation orbit of x under b, which avoids the |a| x |b| pair
    loop while producing the identical generator set.
    """
    by_gens = G.small_generating_set(b)
    out = set()
    for x in a:
        xi = G.inv(x)
        for z in G.conjugation_orbit(x, by_gens):
            out.add(G.mul(xi, z))
    return out


def _commutators(G: FinGroup, a: frozenset, b: frozenset) -> set:
    if a == G.element_set and b == G.element_set:
        return set(G._full_commutator_values)
    return _commutators_raw(G, a, b)


def _assert_normal(G: FinGroup, subset: frozenset) -> None:
    # Normality of every filtration term is a theorem; a failure here
    # means the series construction itself is wrong.
    for g in G.gens:
        gi = G.inv(g)
        for h in subset:
            assert G.mul(G.mul(g, h), gi) in subset, "filtration level not normal"


def series(G: FinGroup, kind: str, p: int | None = None, upto: int = 8) -> SeriesTable:
    """The lower central / p-central / p-Zassenhaus series of G.

    Each level is the plain closure of its defining p-th powers and
    commutators, computed from the already-stored lower levels.
    """
    if kind not in (LOWER_CENTRAL, P_CENTRAL, ZASSENHAUS):
        raise BadParams(f"unknown series kind {kind!r}")
    if kind != LOWER_CENTRAL and (p is None or not is_prime(p)):
        raise BadParams(f"{kind} needs a prime")
    if upto < 1:
        raise BadParams("upto must be >= 1")
    levels: list[frozenset] = [G.element_set]
    stabilized = G.order == 1
    while len(levels) < upto and not stabilized:
        n = len(levels) + 1
        if kind == LOWER_CENTRAL:
            gens = _commutators(G, levels[-1], levels[0])
        elif kind == P_CENTRAL:
            gens = _powers(G, levels[-1], p) | _commutators(G, levels[-1], levels[0])
        else:
            gens = set(_powers(G, levels[math.ceil(n / p) - 1], p))
            for i in range(1, n):
                j = n - i
                if i <= j:
                    gens |= _commutators(G, levels[i - 1], levels[j - 1])
                    if i != j:
                        gens |= _commutators(G, levels[j - 1], levels[i - 1])
        sub = G.subgroup_closure(gens)
        _assert_normal(G, sub)
        if len(sub) == 1:
            levels.append(sub)
            stabilized = True
            break
        if kind != ZASSENHAUS and sub == levels[-1]:
            # The recursion only reads the previous level, so the chain
            # is constant from here on.
            levels.append(sub)
            stabilized = True
            break
        levels.append(sub)
    return SeriesTable(kind, p, tuple(levels), stabilized)


@dataclass(frozen=True)
class FiltrationComparison:
    """Inclusion report between the p-central and Zassenhaus series."""

    p: int
    max_level: int
    pcentral_orders: tuple[int, ...]
    zassenhaus_orders: tuple[int, ...]
    pcentral_in_zassenhaus: tuple[bool, ...]
    zassenhaus_p_plus_1_in_pcentral_3: bool
    level3_equal: bool | None

    @property
    def ok(self) -> bool:
        checks = list(self.pcentral_in_zassenhaus)
        checks.append(self.zassenhaus_p_plus_1_in_pcentral_3)
        if self.level3_equal is not None:
            checks.append(self.level3_equal)
        return all(checks)


def compare_filtrations(G: FinGroup, p: int, max_level: int = 4) -> FiltrationComparison:
    """Check G^(i) <= G_(i) for i <= max_level, G_(p+1) <= G^(3), and the
    p = 2 equality at level 3."""
    depth = max(max_level, 3)
    pc = series(G, P_CENTRAL, p, upto=depth)
    za = series(G, ZASSENHAUS, p, upto=max(depth, p + 1))
    inclusions = tuple(
        pc.level(i) <= za.level(i) for i in range(1, max_level + 1))
    return FiltrationComparison(
        p=p,
        max_level=max_level,
        pcentral_orders=tuple(len(pc.level(i)) for i in range(1, max_level + 1)),
        zassenhaus_orders=tuple(len(za.level(i)) for i in range(1, max_level + 1)),
        pcentral_in_zassenhaus=inclusions,
        zassenhaus_p_plus_1_in_pcentral_3=za.level(p + 1) <= pc.level(3),
        level3_equal=(pc.level(3) == za.level(3)) if p == 2 else None,
    )


@dataclass(frozen=True)
class Presentation:
    """Finite presentation: rank and reduced relator words."""

    rank: int
    relators: tuple[Word, ...]

    def __post_init__(self):
        for r in self.relators:
            if r.max_gen() > self.rank:
                raise BadParams(
                    f"relator {r} uses generators beyond rank {self.rank}")

    @classmethod
    def parse(cls, text: str) -> "Presentation":
        """File format: first line ``rank N``, then one relator per line."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("rank"):
            raise BadParams("presentation must start with 'rank N'")
        try:
            rank = int(lines[0].split()[1])
        except (IndexError, ValueError) as exc:
            raise BadParams("presentation must start with 'rank N'") from exc
        relators = tuple(parse_word(ln, rank) for ln in lines[1:])
        return cls(rank, relators)

    def to_text(self) -> str:
        return "\n".join([f"rank {self.rank}"] + [str(r) for r in self.relators])


def _compile_relator(w: Word) -> list[tuple[int, int]]:
    return [(g - 1, e) for g, e in w.letters]


def _eval_relator(compiled, images, mul_t, inv_t, id_idx) -> int:
    acc = id_idx
    for g, e in compiled:
        x = images[g]
        if e < 0:
            x = inv_t[x]
            e = -e
        row = mul_t
        for _ in range(e):
            acc = row[acc][x]
    return acc


def enumerate_homs(P: Presentation, H: FinGroup,
                   caps: Caps = DEFAULT_CAPS) -> list[tuple]:
    """All homomorphisms as generator-image tuples, by backtracking.

    Relators are checked as soon as every generator they mention has an
    image, pruning the search; results come in lexicographic element
    index order.
    """
    n_els = H.order
    mul_t = H.mul_table()
    inv_t = H.inv_table()
    id_idx = H.index[H.identity]
    by_depth: list[list] = [[] for _ in range(P.rank)]
    for rel in P.relators:
        compiled = _compile_relator(rel)
        if not compiled:
            continue
        top = max(g for g, _ in compiled)
        by_depth[top].append(compiled)

    results: list[tuple] = []
    images = [0] * P.rank
    nodes = 0
    budget = caps.hom_search_nodes

    def descend(depth: int):
        nonlocal nodes
        if depth == P.rank:
            results.append(tuple(H.elements[i] for i in images))
            return
        for cand in range(n_els):
            nodes += 1
            if nodes > budget:
                raise TooLarge(f"hom search exceeded {budget} nodes")
            images[depth] = cand
            if all(_eval_relator(rel, images, mul_t, inv_t, id_idx) == id_idx
                   for rel in by_depth[depth]):
                descend(depth + 1)

    descend(0)
    return results


def extend_images(G: FinGroup, gen_images: Sequence, mul: Callable, one):
    """Image of every element under the map determined on generators,
    following the BFS derivation.  Only a candidate map: homomorphy must
    be verified separately."""
    out = [None] * G.order
    out[0] = one
    for k in range(1, G.order):
        parent, gi = G.derivation[k]
        out[k] = mul(out[parent], gen_images[gi])
    return out


@dataclass
class GroupHom:
    """A homomorphism candidate from a FinGroup into any multiplicative
    codomain (matrix classes here), determined by generator images."""

    domain: FinGroup
    gen_images: tuple
    one: object

    @cached_property
    def images(self) -> list:
        return extend_images(self.domain, self.gen_images,
                             lambda a, b: a * b, self.one)

    def image(self, g):
        return self.images[self.domain.index[g]]

    def verify(self) -> bool:
        """Exhaustive check rho(gh) = rho(g) rho(h) with a product cache."""
        G = self.domain
        imgs = self.images
        idx = G.index
        cache: dict = {}
        for i, a in enumerate(G.elements):
            ia = imgs[i]
            for j, b in enumerate(G.elements):
                ib = imgs[j]
                key = (ia, ib)
                prod = cache.get(key)
                if prod is None:
                    prod = ia * ib
                    cache[key] = prod
                if prod != imgs[idx[G.mul(a, b)]]:
                    return False
        return True

    def is_injective(self) -> bool:
        seen = set()
        for v in self.images:
            if v in seen:
                return False
            seen.add(v)
        return True
