"""Parametric finite groups and their separating unipotent representations.

Families covered: quotients of rigid-field Galois groups (products of
cyclic p-power groups, optionally extended by a power / negated-power /
inverting outer automorphism), the metacyclic groups M_{p,k,s}, and the
rank-2 Demushkin quotients.  Each family knows how to separate any of
its nontrivial elements by a homomorphism into U_{p^(E-1)+1}(F_p), where
p^E is the component exponent; that is exactly the kernel-unipotent
verification recipe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .config import Caps, DEFAULT_CAPS
from .errors import BadParams, NoWitness, TooLarge
from .fingrp import FinGroup, GroupHom, cyclic_group, series, trivial_group
from .freewords import ZASSENHAUS
from .residue import RingSpec, is_prime
from .unimat import (
    TARGET_INVERSE,
    TARGET_NEGPOWER,
    TARGET_POWER,
    UniMat,
    solve_conjugation,
)

ACTION_TRIVIAL = "trivial"
ACTION_POWER = "power"
ACTION_NEGPOWER = "negpower"
ACTION_INVERSE = "inverse"

RIGID_VARIANTS = ("split", "direct", "negsplit", "inv")


@dataclass(frozen=True)
class Family:
    """A built family: the group plus the data the representation
    constructions need (prime, component exponent, outer action)."""

    kind: str
    p: int
    exponent: int
    inner_rank: int
    action: str
    k: int | None
    group: FinGroup
    descriptor: str

    @property
    def has_outer(self) -> bool:
        return len(self.group.gens) == self.inner_rank + 1

    @property
    def modulus(self) -> int:
        return self.p ** self.exponent

    def multiplier(self) -> int:
        """The outer action on inner generators: tau -> tau^t."""
        m = self.modulus
        if self.action == ACTION_TRIVIAL:
            return 1 % m
        if self.action == ACTION_POWER:
            return (1 + self.p ** self.k) % m
        if self.action == ACTION_NEGPOWER:
            return (-(1 + 2 ** self.k)) % m
        return (-1) % m


def _semidirect_group(p: int, exponent: int, m: int, t: int, name: str,
                      caps: Caps) -> FinGroup:
    """(Z/p^E)^m x| Z/p^E with sigma tau sigma^-1 = tau^t."""
    mod = p ** exponent
    size = mod ** (m + 1)
    if size > caps.max_group_size:
        raise TooLarge(f"|{name}| = {size} exceeds cap {caps.max_group_size}")
    tpow = [pow(t, a, mod) for a in range(mod)]

    def mul(x, y):
        ta = tpow[x[-1]]
        return tuple((x[i] + ta * y[i]) % mod for i in range(m)) + \
            ((x[-1] + y[-1]) % mod,)

    def inv(x):
        ti = pow(tpow[x[-1]], -1, mod)
        return tuple((-ti * x[i]) % mod for i in range(m)) + ((-x[-1]) % mod,)

    gens = [tuple(1 if j == i else 0 for j in range(m + 1)) for i in range(m + 1)]
    return FinGroup.generate(gens, mul, inv, (0,) * (m + 1),
                             cap=caps.max_group_size, name=name)


def _product_group(p: int, exponent: int, m: int, name: str, caps: Caps) -> FinGroup:
    mod = p ** exponent
    size = mod ** m
    if size > caps.max_group_size:
        raise TooLarge(f"|{name}| = {size} exceeds cap {caps.max_group_size}")

    def mul(x, y):
        return tuple((a + b) % mod for a, b in zip(x, y))

    def inv(x):
        return tuple((-a) % mod for a in x)

    gens = [tuple(1 if j == i else 0 for j in range(m)) for i in range(m)]
    return FinGroup.generate(gens, mul, inv, (0,) * m,
                             cap=caps.max_group_size, name=name)


def rigid_quotient(p: int, s: int, m: int, variant: str, k: int | None = None,
                   exponent: int | None = None,
                   caps: Caps = DEFAULT_CAPS) -> Family:
    """Finite quotient of a rigid-field Galois group.

    Component exponent defaults to s+1, matching the level n = p^s + 1
    quotient; the ``direct`` variant is the plain product of m cyclic
    factors, the others append an outer factor acting by tau^(1+p^k),
    tau^-(1+2^k) (p = 2) or tau^-1 (p = 2).
    """
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    if variant not in RIGID_VARIANTS:
        raise BadParams(f"unknown rigid variant {variant!r}")
    if m < 1:
        raise BadParams("inner rank m must be >= 1")
    if s < 0:
        raise BadParams("s must be >= 0")
    exponent = s + 1 if exponent is None else exponent
    if exponent < 1:
        raise BadParams("component exponent must be >= 1")
    if variant in ("negsplit", "inv") and p != 2:
        raise BadParams(f"variant {variant} requires p = 2")
    if variant in ("split", "negsplit"):
        if k is None or k < 1:
            raise BadParams(f"variant {variant} requires k >= 1")
    else:
        k = None
    desc = f"rigid:p={p},s={s},k={k},m={m},variant={variant}" if k is not None \
        else f"rigid:p={p},s={s},m={m},variant={variant}"
    action = {"split": ACTION_POWER, "negsplit": ACTION_NEGPOWER,
              "inv": ACTION_INVERSE, "direct": ACTION_TRIVIAL}[variant]
    if variant == "direct":
        group = _product_group(p, exponent, m, desc, caps)
        return Family("rigid", p, exponent, m, ACTION_TRIVIAL, None, group, desc)
    if action == ACTION_POWER:
        t = 1 + p ** k
    elif action == ACTION_NEGPOWER:
        t = -(1 + 2 ** k)
    else:
        t = -1
    t %= p ** exponent
    group = _semidirect_group(p, exponent, m, t, desc, caps)
    return Family("rigid", p, exponent, m, action, k, group, desc)


def mpks_group(p: int, k: int, s: int, caps: Caps = DEFAULT_CAPS) -> Family:
    """M_{p,k,s} = < sigma, tau | tau^(p^(s+1)) = sigma^(p^(s+1-k)) = 1,
    sigma tau sigma^-1 = tau^(1+p^k) >; M_{p^3} is the (k, s) = (1, 1) case."""
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    if not (1 <= k <= s):
        raise BadParams("need 1 <= k <= s")
    mod_t = p ** (s + 1)
    mod_s = p ** (s + 1 - k)
    size = mod_t * mod_s
    if size > caps.max_group_size:
        raise TooLarge(f"|M_{p},{k},{s}| = {size} exceeds cap")
    t = (1 + p ** k) % mod_t
    tpow = [pow(t, b, mod_t) for b in range(mod_s)]

    def mul(x, y):
        return ((x[0] + tpow[x[1]] * y[0]) % mod_t, (x[1] + y[1]) % mod_s)

    def inv(x):
        ti = pow(tpow[x[1]], -1, mod_t)
        return ((-ti * x[0]) % mod_t, (-x[1]) % mod_s)

    desc = f"mpks:p={p},k={k},s={s}"
    group = FinGroup.generate([(1, 0), (0, 1)], mul, inv, (0, 0),
                              cap=caps.max_group_size, name=desc)
    return Family("mpks", p, s + 1, 1, ACTION_POWER, k, group, desc)


DEMUSHKIN_TYPES = (1, 2, 3, 4)


def demushkin_quotient(p: int, dtype: int, q: int | None = None, s: int = 1,
                       exponent: int | None = None,
                       caps: Caps = DEFAULT_CAPS) -> Family:
    """Finite quotient of a rank-2 Demushkin group: (Z/p^E)^2 with the
    relation y x y^-1 = x, x^(1+q), x^-1 (p=2) or x^-(1+q) (p=2).

    The default exponent E = s gives the (a, b) mod p^s model; the
    kernel-property verifier rebuilds at the exponent the level needs.
    """
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    if dtype not in DEMUSHKIN_TYPES:
        raise BadParams(f"Demushkin type must be 1..4, got {dtype}")
    if s < 1:
        raise BadParams("s must be >= 1")
    exponent = s if exponent is None else exponent
    k = None
    if dtype == 1:
        action = ACTION_TRIVIAL
    elif dtype == 2:
        if q is None:
            raise BadParams("type 2 needs q = p^k")
        k = round(math.log(q, p))
        if p ** k != q or k < 1 or (p == 2 and q < 4):
            raise BadParams(f"type 2 needs q a power of p (>= 4 when p = 2), got {q}")
        action = ACTION_POWER
    elif dtype == 3:
        if p != 2:
            raise BadParams("type 3 requires p = 2")
        action = ACTION_INVERSE
    else:
        if p != 2:
            raise BadParams("type 4 requires p = 2")
        if q is None:
            raise BadParams("type 4 needs q = 2^k >= 4")
        k = round(math.log2(q))
        if 2 ** k != q or q < 4:
            raise BadParams(f"type 4 needs q = 2^k >= 4, got {q}")
        action = ACTION_NEGPOWER
    desc = f"demushkin:type={dtype},p={p},s={s}" + ("" if q is None else f",q={q}")
    mod = p ** exponent
    t = {ACTION_TRIVIAL: 1, ACTION_POWER: 1 + (q or 0),
         ACTION_INVERSE: -1, ACTION_NEGPOWER: -(1 + (q or 0))}[action] % mod
    group = _semidirect_group(p, exponent, 1, t, desc, caps)
    return Family("demushkin", p, exponent, 1, action, k, group, desc)


def trivial_family() -> Family:
    return Family("trivial", 2, 1, 0, ACTION_TRIVIAL, None, trivial_group(),
                  "trivial")


def build_family(kind: str, params: dict, caps: Caps = DEFAULT_CAPS) -> Family:
    if kind == "rigid":
        return rigid_quotient(params["p"], params.get("s", 1), params["m"],
                              params["variant"], params.get("k"),
                              params.get("exponent"), caps)
    if kind == "mpks":
        return mpks_group(params["p"], params["k"], params["s"], caps)
    if kind == "demushkin":
        return demushkin_quotient(params["p"], params["type"], params.get("q"),
                                  params.get("s", 1), params.get("exponent"), caps)
    if kind == "trivial":
        return trivial_family()
    raise BadParams(f"unknown family kind {kind!r}")


def parse_family(text: str, caps: Caps = DEFAULT_CAPS) -> Family:
    """Parse CLI descriptors like ``rigid:p=3,s=1,k=1,m=2,variant=split``."""
    if text == "trivial":
        return trivial_family()
    if ":" not in text:
        raise BadParams(f"cannot parse family descriptor {text!r}")
    kind, rest = text.split(":", 1)
    params: dict = {}
    for item in rest.split(","):
        if "=" not in item:
            raise BadParams(f"bad parameter {item!r} in {text!r}")
        key, value = item.split("=", 1)
        params[key] = value if key == "variant" else int(value)
    return build_family(kind, params, caps)


def separating_target_size(family: Family) -> int:
    """Matrix size p^(E-1) + 1: there 1 + X has order exactly p^E."""
    return family.p ** (family.exponent - 1) + 1


def _outer_conjugator(family: Family, n: int) -> UniMat:
    spec = RingSpec.prime_field(family.p)
    if family.action == ACTION_TRIVIAL or family.exponent == 1:
        # Exponent-1 components make every action trivial mod p.
        return UniMat.identity(n, spec)
    s = family.exponent - 1
    target = {ACTION_POWER: TARGET_POWER, ACTION_NEGPOWER: TARGET_NEGPOWER,
              ACTION_INVERSE: TARGET_INVERSE}[family.action]
    k = family.k if target != TARGET_INVERSE else None
    return solve_conjugation(target, family.p, s, k).A


@dataclass(frozen=True)
class SeparatingRep:
    """A homomorphism into U_n(F_p) with rho(u) != 1."""

    family: Family
    u: tuple
    case: int
    coordinate: int | None
    n: int
    hom: GroupHom
    image_of_u: UniMat


def separating_rep(family: Family, u, caps: Caps = DEFAULT_CAPS) -> SeparatingRep:
    """The proof recipe: a nonzero outer component sends sigma to B = 1+X
    and the inner factor to 1; otherwise the first nonzero inner
    coordinate goes to B and sigma to the conjugator A."""
    if family.kind not in ("rigid", "demushkin"):
        raise BadParams(f"separating_rep covers rigid/demushkin, not {family.kind}")
    G = family.group
    if u not in G.index:
        raise BadParams(f"{u} is not an element of {family.descriptor}")
    if u == G.identity:
        raise NoWitness("the identity is in every kernel")
    n = separating_target_size(family)
    spec = RingSpec.prime_field(family.p)
    B = UniMat.one_plus_shift(n, spec)
    one = UniMat.identity(n, spec)
    m = family.inner_rank
    if family.has_outer and u[-1] % family.modulus != 0:
        case, coord = 1, None
        images = [one] * m + [B]
    else:
        coord = next(i for i in range(m) if u[i] % family.modulus != 0)
        case = 2
        images = [one] * m
        images[coord] = B
        if family.has_outer:
            images.append(_outer_conjugator(family, n))
    hom = GroupHom(G, tuple(images), one)
    img = hom.image(u)
    if img.is_identity():
        raise BadParams("separating construction failed; family data inconsistent")
    return SeparatingRep(family, u, case, coord, n, hom, img)


@dataclass(frozen=True)
class KernelReport:
    """Outcome of the kernel n-unipotent check on one finite quotient."""

    descriptor: str
    n: int
    exponent: int
    group_order: int
    series_trivial: bool
    all_separated: bool
    homs_used: int
    homs_verified: bool

    @property
    def ok(self) -> bool:
        return self.series_trivial and self.all_separated and self.homs_verified


def verify_kernel_property(kind: str, params: dict, n: int,
                           caps: Caps = DEFAULT_CAPS) -> KernelReport:
    """Check the kernel n-unipotent property on the level-n quotient:
    its own Zassenhaus level-n term must vanish, and every nontrivial
    element must be separated by a verified representation."""
    if n < 2:
        raise BadParams("kernel verification needs n >= 2")
    if kind == "trivial":
        return KernelReport("trivial", n, 1, 1, True, True, 0, True)
    p = params["p"]
    exponent = 1
    while p ** exponent < n:
        exponent += 1
    if "s" in params and params["s"] is not None and n != p ** params["s"] + 1:
        raise BadParams(
            f"level n = {n} is not p^s + 1 for s = {params['s']}")
    family = build_family(kind, {**params, "exponent": exponent}, caps)
    G = family.group
    table = series(G, ZASSENHAUS, p, upto=n)
    trivial = table.is_trivial_at(n)
    distinct: dict[tuple, GroupHom] = {}
    separated = True
    for u in G.elements:
        if u == G.identity:
            continue
        rep = separating_rep(family, u, caps)
        if rep.image_of_u.is_identity():
            separated = False
            break
        key = tuple(im.rows for im in rep.hom.gen_images)
        distinct.setdefault(key, rep.hom)
    verified = all(h.verify() for h in distinct.values())
    return KernelReport(family.descriptor, n, exponent, G.order,
                        trivial, separated, len(distinct), verified)


@dataclass(frozen=True)
class PowerCharacterRep:
    """A representation into U_{p^s+1}(F_p) whose superdiagonal entries
    realize the designated character on the generators."""

    case: str
    p: int
    s: int
    k: int | None
    n: int
    domain: FinGroup
    hom: GroupHom
    character: tuple[int, ...]
    superdiagonal: tuple[tuple[int, ...], ...]
    verified: bool


def power_character_rep(p: int, s: int, k: int | None, case: str,
                        caps: Caps = DEFAULT_CAPS) -> PowerCharacterRep:
    """The three constructions behind the power-character representations:
    a cyclic p^(s+1) group sent to B (cases 0 and 2), and M_{p,k,s} with
    tau -> B, sigma -> A (case 1, superdiagonal 0 on sigma)."""
    if case not in ("case0", "case1", "case2"):
        raise BadParams(f"case must be case0/case1/case2, got {case!r}")
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    if s < 1:
        raise BadParams("s must be >= 1")
    n = p ** s + 1
    spec = RingSpec.prime_field(p)
    B = UniMat.one_plus_shift(n, spec)
    if case in ("case0", "case2"):
        domain = cyclic_group(p ** (s + 1))
        hom = GroupHom(domain, (B,), UniMat.identity(n, spec))
        character = (1,)
    else:
        if k is None or not (1 <= k <= s):
            raise BadParams("case1 needs 1 <= k <= s")
        if p ** k < 3:
            raise BadParams("case1 needs p^k >= 3 so A has zero superdiagonal")
        family = mpks_group(p, k, s, caps)
        domain = family.group
        A = solve_conjugation(TARGET_POWER, p, s, k).A
        hom = GroupHom(domain, (B, A), UniMat.identity(n, spec))
        character = (1, 0)
    superdiag = tuple(
        tuple(img.entry(i, i + 1) for i in range(1, n)) for img in hom.gen_images)
    expected = tuple(
        tuple(chi for _ in range(1, n)) for chi in character)
    verified = hom.verify() and superdiag == expected
    return PowerCharacterRep(case, p, s, k, n, domain, hom, character,
                             superdiag, verified)


@lru_cache(maxsize=8)
def unipotent_exponent_scan(p: int, caps: Caps = DEFAULT_CAPS) -> tuple[int, int]:
    """Exhaustively confirm that U_p(F_p) has exponent p.

    Returns (exponent, number of matrices scanned).  Small groups are
    walked directly; for p = 5 the 5^10 matrices are checked in numpy
    batches, still with exact integer arithmetic.
    """
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    free = p * (p - 1) // 2
    total = p ** free
    if total <= 200_000:
        from .unimat import exhaustive_unipotent
        exponent = 1
        count = 0
        for m in exhaustive_unipotent(p, p):
            count += 1
            exponent = math.lcm(exponent, m.order())
        return exponent, count
    if total > 12_000_000:
        raise TooLarge(f"scan of {total} matrices is out of budget")
    import numpy as np

    positions = [(i, j) for i in range(p) for j in range(i + 1, p)]
    chunk = 250_000
    scanned = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        mats = np.zeros((len(idx), p, p), dtype=np.uint8)
        for a in range(p):
            mats[:, a, a] = 1
        rem = idx.copy()
        for (i, j) in positions:
            mats[:, i, j] = (rem % p).astype(np.uint8)
            rem //= p
        power = np.broadcast_to(np.eye(p, dtype=np.uint8), mats.shape).copy()
        base = mats
        e = p
        while e:
            if e & 1:
                power = (np.matmul(power, base, dtype=np.uint16) % p).astype(np.uint8)
            e >>= 1
            if e:
                base = (np.matmul(base, base, dtype=np.uint16) % p).astype(np.uint8)
        if not np.array_equal(power, np.broadcast_to(np.eye(p, dtype=np.uint8), power.shape)):
            raise BadParams("found an element of order > p; scan inconsistent")
        scanned += len(idx)
    # Orders divide p and the group is nontrivial, so the exponent is p.
    return p, scanned


@dataclass(frozen=True)
class EmbeddingReport:
    """Minimal embedding into U_{p+1}(F_p) plus the minimality evidence."""

    which: str
    p: int
    n: int
    group_order: int
    injective: bool
    verified: bool
    exponent_below: int
    scanned_below: int

    @property
    def ok(self) -> bool:
        return self.injective and self.verified and self.exponent_below == self.p


def minimal_embedding(which: str, p: int, caps: Caps = DEFAULT_CAPS) -> EmbeddingReport:
    """Embed Z/p^2 (1 -> B) or M_{p^3} (x -> B, y -> A) into U_{p+1}(F_p)
    and certify that no smaller size works: U_p(F_p) has exponent p."""
    if p == 2 or not is_prime(p):
        raise BadParams("minimal embeddings are for odd primes")
    n = p + 1
    spec = RingSpec.prime_field(p)
    B = UniMat.one_plus_shift(n, spec)
    if which == "cyclic-p2":
        domain = cyclic_group(p * p)
        hom = GroupHom(domain, (B,), UniMat.identity(n, spec))
    elif which == "mp3":
        domain = mpks_group(p, 1, 1, caps).group
        A = solve_conjugation(TARGET_POWER, p, 1, 1).A
        hom = GroupHom(domain, (B, A), UniMat.identity(n, spec))
    else:
        raise BadParams(f"which must be cyclic-p2 or mp3, got {which!r}")
    exponent, scanned = unipotent_exponent_scan(p, caps)
    return EmbeddingReport(which, p, n, domain.order, hom.is_injective(),
                           hom.verify(), exponent, scanned)
