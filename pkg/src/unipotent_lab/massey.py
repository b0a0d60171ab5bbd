"""Massey products for finite groups over F_p.

Two independent routes are implemented.  The primary one searches for
homomorphisms into the corner-quotient matrix group with prescribed
superdiagonal (the correspondence of defining systems with such
homomorphisms): the product is defined iff a homomorphism exists, and
vanishes iff one of them lifts through the corner center.  The oracle
route enumerates defining systems of 1-cochains directly and evaluates
the product at cochain level.  Signs follow the correspondence verbatim:
the superdiagonal carries -alpha_i and entry (i, j) carries -a_{ij}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .config import Caps, DEFAULT_CAPS
from .errors import BadParams, TooLarge
from .fingrp import FinGroup, extend_images
from .linalg import solve
from .residue import RingSpec, is_prime
from .unimat import BarUniMat, Rows, UniMat, mat_identity, mat_mul

UNDEFINED = "undefined"
DEFINED_NOT_VANISHING = "defined-not-vanishing"
VANISHING = "vanishing"

_NUMPY_THRESHOLD = 50_000


@dataclass(frozen=True)
class Character:
    """An additive map G -> F_p, i.e. an element of Hom(G, F_p)."""

    G: FinGroup
    p: int
    values: tuple[int, ...]  # aligned with G.elements

    @classmethod
    def from_gen_values(cls, G: FinGroup, p: int, gen_values) -> "Character":
        gen_values = [v % p for v in gen_values]
        if len(gen_values) != len(G.gens):
            raise BadParams(
                f"expected {len(G.gens)} generator values, got {len(gen_values)}")
        vals = extend_images(G, gen_values, lambda a, b: (a + b) % p, 0)
        chi = cls(G, p, tuple(vals))
        if not chi.is_additive():
            raise BadParams("generator values do not define a character")
        return chi

    @classmethod
    def zero(cls, G: FinGroup, p: int) -> "Character":
        return cls(G, p, (0,) * G.order)

    def is_additive(self) -> bool:
        G, p = self.G, self.p
        idx = G.index
        v = self.values
        return all(
            v[idx[G.mul(a, b)]] == (v[i] + v[j]) % p
            for i, a in enumerate(G.elements)
            for j, b in enumerate(G.elements))

    def __call__(self, g) -> int:
        return self.values[self.G.index[g]]

    def on_gens(self) -> tuple[int, ...]:
        return tuple(self.values[self.G.index[g]] for g in self.G.gens)

    def scale(self, c: int) -> "Character":
        return Character(self.G, self.p, tuple((c * v) % self.p for v in self.values))


def all_characters(G: FinGroup, p: int) -> list[Character]:
    """Hom(G, F_p), enumerated by generator values in row-major order."""
    out = []
    for vals in itertools.product(range(p), repeat=len(G.gens)):
        try:
            out.append(Character.from_gen_values(G, p, vals))
        except BadParams:
            continue
    return out


# ---------------------------------------------------------------------------
# Inhomogeneous cochains with trivial coefficients.

def coboundary_1(b: dict, G: FinGroup, p: int) -> dict:
    """(db)(g, h) = b(g) + b(h) - b(gh)."""
    return {(g, h): (b[g] + b[h] - b[G.mul(g, h)]) % p
            for g in G.elements for h in G.elements}


def cup(a: dict, b: dict, G: FinGroup, p: int) -> dict:
    """(a u b)(g, h) = a(g) b(h)."""
    return {(g, h): (a[g] * b[h]) % p for g in G.elements for h in G.elements}


def is_2_cocycle(c: dict, G: FinGroup, p: int) -> bool:
    els = G.elements
    mul = G.mul
    return all(
        (c[(h, k)] - c[(mul(g, h), k)] + c[(g, mul(h, k))] - c[(g, h)]) % p == 0
        for g in els for h in els for k in els)


def is_2_coboundary(c: dict, G: FinGroup, p: int) -> tuple[bool, dict | None]:
    """Solve db = c exactly over F_p; returns the witness 1-cochain."""
    els = G.elements
    idx = G.index
    if len(els) ** 2 > 1_000_000:
        raise TooLarge("coboundary system too large")
    rows = []
    rhs = []
    for g in els:
        for h in els:
            row = [0] * len(els)
            row[idx[g]] += 1
            row[idx[h]] += 1
            row[idx[G.mul(g, h)]] -= 1
            rows.append([x % p for x in row])
            rhs.append(c[(g, h)] % p)
    sol = solve(rows, rhs, p)
    if sol is None:
        return False, None
    return True, {g: sol[idx[g]] for g in els}


def defining_positions(n: int) -> list[tuple[int, int]]:
    """All (i, j) slots of an n-fold defining system, row-major; the
    corner (1, n+1) is omitted."""
    return [(i, j) for i in range(1, n + 2) for j in range(i + 1, n + 2)
            if (i, j) != (1, n + 1)]


def free_positions(n: int) -> list[tuple[int, int]]:
    """The slots not pinned by the characters: j - i >= 2, corner omitted."""
    return [(i, j) for (i, j) in defining_positions(n) if j - i >= 2]


@dataclass
class DefiningSystem:
    """1-cochains a_{ij} on the defining slots.

    a_{i,i+1} must equal alpha_i (degree-1 coboundaries vanish for
    trivial coefficients, so representing a class means equality), and
    d a_{ij} = sum_{i<l<j} a_{il} u a_{lj} for the longer intervals.
    """

    n: int
    p: int
    G: FinGroup
    maps: dict  # (i, j) -> dict element -> value

    def validate(self, alphas) -> bool:
        G, p = self.G, self.p
        for i, alpha in enumerate(alphas, start=1):
            a = self.maps[(i, i + 1)]
            if any(a[g] != alpha(g) for g in G.elements):
                return False
        for (i, j) in defining_positions(self.n):
            if j - i < 2:
                continue
            lhs = coboundary_1(self.maps[(i, j)], G, p)
            for g in G.elements:
                for h in G.elements:
                    total = sum(
                        self.maps[(i, l)][g] * self.maps[(l, j)][h]
                        for l in range(i + 1, j))
                    if lhs[(g, h)] % p != total % p:
                        return False
        return True

    def massey_value(self) -> tuple[dict, bool]:
        """The 2-cochain sum_{k=2..n} a_{1k} u a_{k,n+1}, plus whether it
        is a coboundary."""
        G, p = self.G, self.p
        value = {
            (g, h): sum(self.maps[(1, k)][g] * self.maps[(k, self.n + 1)][h]
                        for k in range(2, self.n + 1)) % p
            for g in G.elements for h in G.elements}
        bounds, _ = is_2_coboundary(value, G, p)
        return value, bounds

    def to_bar_hom_images(self) -> list[Rows]:
        """Generator images of the corresponding matrix map: entry (i, j)
        is -a_{ij} evaluated at the generator."""
        size = self.n + 1
        images = []
        for g in self.G.gens:
            rows = [list(r) for r in mat_identity(size)]
            for (i, j) in defining_positions(self.n):
                rows[i - 1][j - 1] = (-self.maps[(i, j)][g]) % self.p
            images.append(tuple(tuple(r) for r in rows))
        return images


def validate_defining_system(M: DefiningSystem, alphas) -> bool:
    return M.validate(alphas)


def massey_value(M: DefiningSystem) -> tuple[dict, bool]:
    return M.massey_value()


# ---------------------------------------------------------------------------
# The homomorphism-side search.

@dataclass(frozen=True)
class MasseyVerdict:
    """Outcome of the n-fold product search, with matrix witnesses."""

    status: str
    n: int
    p: int
    candidates: int
    homs_found: int
    bar_witness: tuple[BarUniMat, ...] | None
    lift_witness: tuple[UniMat, ...] | None

    @property
    def defined(self) -> bool:
        return self.status != UNDEFINED

    @property
    def vanishes(self) -> bool:
        return self.status == VANISHING


def _check_alphas(G: FinGroup, alphas, n: int) -> int:
    if n < 2:
        raise BadParams("Massey products need n >= 2")
    if len(alphas) != n:
        raise BadParams(f"need {n} characters, got {len(alphas)}")
    ps = {a.p for a in alphas}
    if len(ps) != 1:
        raise BadParams("characters over different primes")
    p = ps.pop()
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    for a in alphas:
        if a.G is not G and a.G.elements != G.elements:
            raise BadParams("characters defined on a different group")
    return p


def _candidate_rows(size: int, superdiag: tuple[int, ...], free_pos, values,
                    p: int) -> Rows:
    rows = [list(r) for r in mat_identity(size)]
    for i, v in enumerate(superdiag):
        rows[i][i + 1] = v % p
    for (i, j), v in zip(free_pos, values):
        rows[i][j] = v
    return tuple(tuple(r) for r in rows)


def _power_rows(rows: Rows, e: int, p: int) -> Rows:
    out = mat_identity(len(rows))
    base = rows
    while e:
        if e & 1:
            out = mat_mul(out, base, p)
        if e > 1:
            base = mat_mul(base, base, p)
        e >>= 1
    return out


def _offcorner_is_identity(rows: Rows, p: int) -> bool:
    size = len(rows)
    for i in range(size):
        for j in range(size):
            if i == 0 and j == size - 1:
                continue
            if rows[i][j] != (1 if i == j else 0):
                return False
    return True


def _dwyer_cyclic(G: FinGroup, superdiag, n: int, p: int, caps: Caps,
                  use_numpy: bool):
    """Single-generator groups: a candidate matrix M gives a homomorphism
    iff M^|G| projects to the identity; it lifts iff the corner of M^|G|
    can be cancelled by the central corner choice, i.e. always when
    |G| != 0 mod p and exactly when that corner vanishes otherwise."""
    m = G.order
    size = n + 1
    free = free_positions(n)
    free0 = [(i - 1, j - 1) for (i, j) in free]
    total = p ** len(free)
    corner_solvable_always = m % p != 0
    if use_numpy and total > _NUMPY_THRESHOLD:
        return _dwyer_cyclic_numpy(m, size, superdiag, free0, total, p,
                                   corner_solvable_always)
    homs = 0
    first_hom = None
    first_lift = None
    for values in itertools.product(range(p), repeat=len(free0)):
        rows = _candidate_rows(size, superdiag, free0, values, p)
        power = _power_rows(rows, m, p)
        if not _offcorner_is_identity(power, p):
            continue
        homs += 1
        if first_hom is None:
            first_hom = rows
        if first_lift is None:
            corner = power[0][size - 1]
            if corner_solvable_always:
                c = (-corner * pow(m % p, -1, p)) % p
                first_lift = (rows, c)
            elif corner % p == 0:
                first_lift = (rows, 0)
    return homs, total, first_hom, first_lift


def _dwyer_cyclic_numpy(m, size, superdiag, free0, total, p,
                        corner_solvable_always):
    import numpy as np

    chunk = 200_000
    homs = 0
    first_hom = None
    first_lift = None
    eye = np.eye(size, dtype=np.uint8)
    offcorner = np.ones((size, size), dtype=bool)
    offcorner[0, size - 1] = False
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        mats = np.zeros((len(idx), size, size), dtype=np.uint8)
        for a in range(size):
            mats[:, a, a] = 1
        for a, v in enumerate(superdiag):
            mats[:, a, a + 1] = v % p
        # Row-major digit order: the first free slot is the most
        # significant digit, matching itertools.product.
        shift = idx
        for t, (i, j) in enumerate(free0):
            digit = (shift // p ** (len(free0) - 1 - t)) % p
            mats[:, i, j] = digit.astype(np.uint8)
        power = np.broadcast_to(eye, mats.shape).copy()
        base = mats
        e = m
        while e:
            if e & 1:
                power = (np.matmul(power, base, dtype=np.uint32) % p).astype(np.uint8)
            e >>= 1
            if e:
                base = (np.matmul(base, base, dtype=np.uint32) % p).astype(np.uint8)
        hom_mask = np.all((power == eye) | ~offcorner, axis=(1, 2))
        homs += int(hom_mask.sum())
        corners = power[:, 0, size - 1]
        if corner_solvable_always:
            lift_mask = hom_mask
        else:
            lift_mask = hom_mask & (corners % p == 0)
        if first_hom is None and hom_mask.any():
            k = int(np.argmax(hom_mask))
            first_hom = tuple(tuple(int(x) for x in row) for row in mats[k])
        if first_lift is None and lift_mask.any():
            k = int(np.argmax(lift_mask))
            rows = tuple(tuple(int(x) for x in row) for row in mats[k])
            if corner_solvable_always:
                c = (-int(corners[k]) * pow(m % p, -1, p)) % p
            else:
                c = 0
            first_lift = (rows, c)
    return homs, total, first_hom, first_lift


def _dwyer_general(G: FinGroup, superdiags, n: int, p: int, caps: Caps):
    """Arbitrary generating sets: extend candidate generator images along
    the BFS tree and check the whole multiplication table, in the
    quotient for definedness and in the full group for lifting."""
    size = n + 1
    free = [(i - 1, j - 1) for (i, j) in free_positions(n)]
    ngens = len(G.gens)
    total = p ** (len(free) * ngens)
    spec = RingSpec.prime_field(p)
    idx = G.index
    pairs = [(i, j, idx[G.mul(a, b)])
             for i, a in enumerate(G.elements)
             for j, b in enumerate(G.elements)]
    homs = 0
    first_hom = None
    first_lift = None
    for flat in itertools.product(range(p), repeat=len(free) * ngens):
        images = []
        for gpos in range(ngens):
            vals = flat[gpos * len(free):(gpos + 1) * len(free)]
            images.append(BarUniMat(
                size, spec,
                _candidate_rows(size, superdiags[gpos], free, vals, p)))
        bar_imgs = extend_images(G, images, lambda a, b: a * b,
                                 BarUniMat.identity(size, spec))
        if any(bar_imgs[i] * bar_imgs[j] != bar_imgs[k] for i, j, k in pairs):
            continue
        homs += 1
        if first_hom is None:
            first_hom = tuple(images)
        if first_lift is None:
            first_lift = _try_lift(G, images, pairs, size, spec, p)
    return homs, total, first_hom, first_lift


def _try_lift(G: FinGroup, bar_images, pairs, size, spec, p):
    """Search the p^#gens corner assignments for a full homomorphism."""
    one = UniMat.identity(size, spec)
    for corners in itertools.product(range(p), repeat=len(bar_images)):
        images = []
        for bar, c in zip(bar_images, corners):
            rows = [list(r) for r in bar.rows]
            rows[0][size - 1] = c
            images.append(UniMat(size, spec, tuple(tuple(r) for r in rows)))
        full = extend_images(G, images, lambda a, b: a * b, one)
        if all(full[i] * full[j] == full[k] for i, j, k in pairs):
            return tuple(images), corners
    return None


def dwyer_search(G: FinGroup, alphas, n: int, caps: Caps = DEFAULT_CAPS,
                 force_path: str | None = None) -> MasseyVerdict:
    """Verdict for the n-fold product of the given characters.

    Candidates are enumerated over the free matrix entries in row-major
    order with values 0..p-1; the first witness in that order is
    reported, so results are independent of the execution path.
    """
    p = _check_alphas(G, alphas, n)
    spec = RingSpec.prime_field(p)
    size = n + 1
    superdiags = [
        tuple((-alpha(g)) % p for alpha in alphas) for g in G.gens]
    nfree = len(free_positions(n))
    total = p ** (nfree * max(len(G.gens), 1))
    if total > caps.massey_candidates:
        raise TooLarge(
            f"{total} candidate maps exceed budget {caps.massey_candidates}")
    if len(G.gens) == 0:
        # Trivial group: the zero system is the only candidate and lifts.
        return MasseyVerdict(VANISHING, n, p, 1, 1, (), ())
    if len(G.gens) == 1 and force_path != "general":
        use_numpy = force_path != "python"
        homs, candidates, first_hom, first_lift = _dwyer_cyclic(
            G, superdiags[0], n, p, caps, use_numpy)
        bar = (BarUniMat(size, spec, first_hom),) if first_hom else None
        lift = None
        if first_lift is not None:
            rows, c = first_lift
            full = [list(r) for r in rows]
            full[0][size - 1] = c
            lift = (UniMat(size, spec, tuple(tuple(r) for r in full)),)
    else:
        homs, candidates, first_hom, first_lift = _dwyer_general(
            G, superdiags, n, p, caps)
        bar = tuple(first_hom) if first_hom else None
        lift = None
        if first_lift is not None:
            lift = first_lift[0]
    if homs == 0:
        return MasseyVerdict(UNDEFINED, n, p, candidates, 0, None, None)
    if lift is None:
        return MasseyVerdict(DEFINED_NOT_VANISHING, n, p, candidates, homs,
                             bar, None)
    return MasseyVerdict(VANISHING, n, p, candidates, homs, bar, lift)


# ---------------------------------------------------------------------------
# The cochain-side oracle and the cross check.

@dataclass(frozen=True)
class CochainVerdict:
    status: str
    systems_found: int
    first_vanishing: DefiningSystem | None


def cochain_verdict(G: FinGroup, alphas, n: int,
                    caps: Caps = DEFAULT_CAPS) -> CochainVerdict:
    """Exhaustive enumeration of defining systems at cochain level."""
    p = _check_alphas(G, alphas, n)
    free = free_positions(n)
    combos = p ** (len(free) * G.order)
    if combos > caps.cochain_combos:
        raise TooLarge(f"{combos} cochain assignments exceed budget")
    base_maps = {(i, i + 1): {g: alphas[i - 1](g) for g in G.elements}
                 for i in range(1, n + 1)}
    found = 0
    first_vanishing = None
    verdictless = True
    for flat in itertools.product(range(p), repeat=len(free) * G.order):
        maps = dict(base_maps)
        for t, pos in enumerate(free):
            vals = flat[t * G.order:(t + 1) * G.order]
            maps[pos] = {g: v for g, v in zip(G.elements, vals)}
        system = DefiningSystem(n, p, G, maps)
        if not system.validate(alphas):
            continue
        found += 1
        if first_vanishing is None:
            _, bounds = system.massey_value()
            if bounds:
                first_vanishing = system
    if found == 0:
        return CochainVerdict(UNDEFINED, 0, None)
    if first_vanishing is None:
        return CochainVerdict(DEFINED_NOT_VANISHING, found, None)
    return CochainVerdict(VANISHING, found, first_vanishing)


@dataclass(frozen=True)
class CrossCheck:
    """Agreement report between the two routes."""

    dwyer: MasseyVerdict
    cochain: CochainVerdict
    counts_match: bool
    bijection_valid: bool

    @property
    def ok(self) -> bool:
        return (self.dwyer.status == self.cochain.status
                and self.counts_match and self.bijection_valid)


def cross_check(G: FinGroup, alphas, n: int,
                caps: Caps = DEFAULT_CAPS) -> CrossCheck:
    """Both verdicts must agree; additionally every enumerated defining
    system must map to a genuine quotient homomorphism under
    (i, j) -> -a_{ij}, in matching number."""
    p = _check_alphas(G, alphas, n)
    dwy = dwyer_search(G, alphas, n, caps)
    coc = cochain_verdict(G, alphas, n, caps)
    free = free_positions(n)
    spec = RingSpec.prime_field(p)
    size = n + 1
    idx = G.index
    pairs = [(i, j, idx[G.mul(a, b)])
             for i, a in enumerate(G.elements)
             for j, b in enumerate(G.elements)]
    base_maps = {(i, i + 1): {g: alphas[i - 1](g) for g in G.elements}
                 for i in range(1, n + 1)}
    valid_hom_images = 0
    bijection_valid = True
    for flat in itertools.product(range(p), repeat=len(free) * G.order):
        maps = dict(base_maps)
        for t, pos in enumerate(free):
            vals = flat[t * G.order:(t + 1) * G.order]
            maps[pos] = {g: v for g, v in zip(G.elements, vals)}
        system = DefiningSystem(n, p, G, maps)
        if not system.validate(alphas):
            continue
        images = [BarUniMat(size, spec, rows)
                  for rows in system.to_bar_hom_images()]
        bar_imgs = extend_images(G, images, lambda a, b: a * b,
                                 BarUniMat.identity(size, spec))
        if all(bar_imgs[i] * bar_imgs[j] == bar_imgs[k] for i, j, k in pairs):
            valid_hom_images += 1
        else:
            bijection_valid = False
    counts_match = valid_hom_images == dwy.homs_found == coc.systems_found
    return CrossCheck(dwy, coc, counts_match, bijection_valid)
