"""Counterexamples to the kernel n-unipotent property.

The instance is the rank-N group with relators r_ij = [x1,x2][xi,xj]^-1:
every commutator of generators is glued to [x1,x2].  Against a list of
finite targets smaller than N, the pigeonhole forces two generator
images to coincide, so every homomorphism kills [x1,x2]; a degree-2
Magnus computation shows [x1,x2] survives in the quotient's own level-3
Zassenhaus term, so the kernel filtration is strictly coarser.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import Caps, DEFAULT_CAPS
from .errors import BadParams, TooLarge
from .fingrp import FinGroup, Presentation, enumerate_homs
from .freewords import Word
from .ncseries import magnus
from .linalg import SparseSpan
from .residue import RingSpec, is_prime

VIOLATED = "violated"
NOT_VIOLATED = "not-violated"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class AppendixInstance:
    p: int
    N: int
    targets: tuple[tuple[str, FinGroup], ...]
    presentation: Presentation

    @property
    def commutator_word(self) -> Word:
        return Word.gen(1, self.N).commutator(Word.gen(2, self.N))


def relator(i: int, j: int, N: int) -> Word:
    """r_ij = [x1, x2] [xi, xj]^-1."""
    x = lambda k: Word.gen(k, N)
    return x(1).commutator(x(2)) * x(i).commutator(x(j)).inverse()


def build_instance(p: int, N: int, targets, caps: Caps = DEFAULT_CAPS) -> AppendixInstance:
    """Presentation of rank N with all r_ij, 1 <= i < j <= N, (i,j) != (1,2)."""
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    if N < 3:
        raise BadParams(f"need N >= 3 generators, got {N}")
    relators = tuple(
        relator(i, j, N)
        for i in range(1, N + 1) for j in range(i + 1, N + 1)
        if (i, j) != (1, 2))
    pres = Presentation(N, relators)
    named = []
    for t in targets:
        if isinstance(t, tuple):
            named.append(t)
        else:
            named.append((t.name, t))
    return AppendixInstance(p, N, tuple(named), pres)


def degree2_vector(w: Word, N: int, p: int) -> list[int]:
    """Magnus coefficients of all length-2 multi-indices, row-major."""
    spec = RingSpec.prime_field(p)
    table = magnus(w, spec, cutoff=2, d=N)
    return [table.coeff((i, j)) for i in range(1, N + 1) for j in range(1, N + 1)]


def _degree2_sparse(w: Word, N: int, p: int) -> dict[int, int]:
    spec = RingSpec.prime_field(p)
    table = magnus(w, spec, cutoff=2, d=N)
    return {(I[0] - 1) * N + (I[1] - 1): c
            for I, c in table.coeffs.items() if len(I) == 2}


def commutator_functional(vec: list[int], N: int, p: int) -> int:
    """The functional with value 1 on each [xi, xj]: sum of the (i, j)
    coordinates over i < j."""
    total = 0
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            total += vec[(i - 1) * N + (j - 1)]
    return total % p


def not_in_g3(inst: AppendixInstance) -> bool:
    """Whether [x1, x2] survives modulo the relator span in degree 2.

    Conjugation is trivial on the degree-2 layer, so the image of the
    normal closure of the relators is the F_p-span of their coefficient
    vectors; the commutator escapes level 3 iff its vector is outside.
    """
    span = SparseSpan(inst.p)
    for r in inst.presentation.relators:
        span.add(_degree2_sparse(r, inst.N, inst.p))
    return not span.contains(_degree2_sparse(inst.commutator_word, inst.N, inst.p))


def commutator_vectors_rank(N: int, p: int) -> int:
    """Rank of the degree-2 vectors of all [xi, xj], i < j."""
    span = SparseSpan(p)
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            span.add(_degree2_sparse(Word.gen(i, N).commutator(Word.gen(j, N)), N, p))
    return span.rank


def _tables(H: FinGroup, caps: Caps):
    mul_t = H.mul_table()
    inv_t = H.inv_table()
    comm = [[mul_t[mul_t[inv_t[a]][inv_t[b]]][mul_t[a][b]]
             for b in range(H.order)] for a in range(H.order)]
    return mul_t, inv_t, comm


def find_noncommuting_hom(inst: AppendixInstance, H: FinGroup,
                          caps: Caps = DEFAULT_CAPS):
    """Search for a homomorphism whose image of [x1, x2] is nontrivial.

    Complete backtracking: images h1..hN must satisfy [h_i, h_j] = c for
    every i < j with c = [h1, h2] != 1.  Returns the first tuple found
    (by element index order) or None; None decides the universal claim
    that every homomorphism kills the commutator.
    """
    n_els = H.order
    _, _, comm = _tables(H, caps)
    id_idx = H.index[H.identity]
    budget = caps.hom_search_nodes
    nodes = 0
    images = [0] * inst.N

    def extend(depth: int, c: int, cands: list[int]):
        # cands already satisfy the constraints from images[0:depth-1];
        # narrow by the newest image only.
        nonlocal nodes
        if depth == inst.N:
            return True
        row = comm[images[depth - 1]]
        narrowed = [x for x in cands if row[x] == c]
        nodes += len(cands)
        if nodes > budget:
            raise TooLarge(f"counterexample search exceeded {budget} nodes")
        for cand in narrowed:
            images[depth] = cand
            if extend(depth + 1, c, narrowed):
                return True
        return False

    all_cands = list(range(n_els))
    for h1 in range(n_els):
        images[0] = h1
        row1 = comm[h1]
        for h2 in range(n_els):
            c = row1[h2]
            if c == id_idx:
                continue
            images[1] = h2
            start = [x for x in all_cands if row1[x] == c]
            if extend(2, c, start):
                return tuple(H.elements[i] for i in images)
    return None


def in_kernel_filtration(inst: AppendixInstance,
                         caps: Caps = DEFAULT_CAPS) -> bool:
    """True iff every homomorphism to every target kills [x1, x2]."""
    return all(
        find_noncommuting_hom(inst, H, caps) is None
        for _, H in inst.targets)


def hom_counts(inst: AppendixInstance, caps: Caps = DEFAULT_CAPS) -> dict[str, int]:
    """Full enumeration per target (budget permitting)."""
    return {label: len(enumerate_homs(inst.presentation, H, caps))
            for label, H in inst.targets}


def max_constant_commutator_tuple(H: FinGroup, caps: Caps = DEFAULT_CAPS) -> int:
    """Longest sequence of distinct elements whose ordered pairwise
    commutators all equal one fixed nontrivial value."""
    n_els = H.order
    _, _, comm = _tables(H, caps)
    id_idx = H.index[H.identity]
    best = 0

    def extend(chosen: list[int], c: int) -> int:
        deepest = len(chosen)
        for cand in range(n_els):
            if cand in chosen:
                continue
            if all(comm[x][cand] == c for x in chosen):
                deepest = max(deepest, extend(chosen + [cand], c))
        return deepest

    for c in range(n_els):
        if c == id_idx:
            continue
        best = max(best, extend([], c))
    return best


@dataclass(frozen=True)
class AppendixReport:
    """Verdict on the kernel n-unipotent property for one instance."""

    p: int
    N: int
    n: int
    target_labels: tuple[str, ...]
    pigeonhole_ok: bool
    status: str
    commutator_outside_g3: bool | None
    commutator_in_kernel_filtration: bool | None

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED


def violates_kernel_property(inst: AppendixInstance, n: int = 3,
                             caps: Caps = DEFAULT_CAPS) -> AppendixReport:
    """Does the instance break the kernel n-unipotent property?

    Established when [x1, x2] is outside level 3 (hence outside every
    level n >= 3) yet inside every representation kernel.  When some
    target is at least as large as N the pigeonhole assumption fails and
    the verdict is inconclusive.
    """
    if n < 3:
        raise BadParams("the construction needs n >= 3")
    labels = tuple(label for label, _ in inst.targets)
    pigeonhole_ok = all(inst.N > H.order for _, H in inst.targets)
    if not pigeonhole_ok:
        return AppendixReport(inst.p, inst.N, n, labels, False, INCONCLUSIVE,
                              None, None)
    outside = not_in_g3(inst)
    inside = in_kernel_filtration(inst, caps)
    status = VIOLATED if (outside and inside) else NOT_VIOLATED
    return AppendixReport(inst.p, inst.N, n, labels, True, status,
                          outside, inside)
