import pytest

from unipotent_lab.appendix import (
    INCONCLUSIVE,
    VIOLATED,
    build_instance,
    commutator_functional,
    commutator_vectors_rank,
    degree2_vector,
    find_noncommuting_hom,
    hom_counts,
    in_kernel_filtration,
    max_constant_commutator_tuple,
    not_in_g3,
    relator,
    violates_kernel_property,
)
from unipotent_lab.config import Caps
from unipotent_lab.errors import BadParams, TooLarge
from unipotent_lab.fingrp import cyclic_group, enumerate_homs, trivial_group, unitriangular_group
from unipotent_lab.residue import RingSpec

U3F2 = unitriangular_group(3, RingSpec.prime_field(2))


def test_relator_counts_and_shape():
    inst = build_instance(2, 9, [("u3f2", U3F2)])
    assert len(inst.presentation.relators) == 9 * 8 // 2 - 1
    inst = build_instance(2, 3, [])
    assert len(inst.presentation.relators) == 2
    # r13 reduces to [x1,x2][x1,x3]^-1 of length 8.
    assert relator(1, 3, 9).length() == 8
    with pytest.raises(BadParams):
        build_instance(2, 2, [])


def test_not_in_g3():
    assert not_in_g3(build_instance(2, 9, []))
    assert not_in_g3(build_instance(3, 4, []))


def test_relator_vector_in_own_span():
    # Sanity: each relator vector is inside the relator span.
    from unipotent_lab.linalg import in_span
    inst = build_instance(2, 9, [])
    vectors = [degree2_vector(r, 9, 2) for r in inst.presentation.relators]
    assert in_span(vectors, degree2_vector(relator(1, 3, 9), 9, 2), 2)


def test_functional_values():
    # The dual route: value 1 on every commutator [xi,xj], 0 on relators.
    for p, N in ((2, 9), (3, 4)):
        from unipotent_lab.freewords import Word
        comm = Word.gen(1, N).commutator(Word.gen(2, N))
        assert commutator_functional(degree2_vector(comm, N, p), N, p) == 1
        for i in range(1, N + 1):
            for j in range(i + 1, N + 1):
                if (i, j) == (1, 2):
                    continue
                vec = degree2_vector(relator(i, j, N), N, p)
                assert commutator_functional(vec, N, p) == 0


def test_degree2_independence_rank():
    # The C(N,2) commutator vectors are linearly independent.
    for p in (2, 3):
        for N in (3, 5, 9):
            assert commutator_vectors_rank(N, p) == N * (N - 1) // 2


def test_sparse_span_matches_dense():
    # Oracle: dense rank / span membership on the same vectors.
    from unipotent_lab.linalg import SparseSpan, in_span, rank
    inst = build_instance(2, 5, [])
    vectors = [degree2_vector(r, 5, 2) for r in inst.presentation.relators]
    target = degree2_vector(inst.commutator_word, 5, 2)
    span = SparseSpan(2)
    for v in vectors:
        span.add({i: x for i, x in enumerate(v) if x})
    assert span.rank == rank(vectors, 2)
    assert span.contains({i: x for i, x in enumerate(target) if x}) == \
        in_span(vectors, target, 2)


def test_in_kernel_filtration_cases():
    assert in_kernel_filtration(build_instance(2, 9, [("u3f2", U3F2)]))
    assert in_kernel_filtration(build_instance(3, 4, [("trivial", trivial_group())]))
    # Abelian targets kill every commutator outright.
    assert in_kernel_filtration(build_instance(2, 5, [("c4", cyclic_group(4))]))
    # N = 3 is small enough that a non-commuting hom into U_3(F_2) exists.
    inst = build_instance(2, 3, [("u3f2", U3F2)])
    hom = find_noncommuting_hom(inst, U3F2)
    assert hom is not None
    c = U3F2.commutator(hom[0], hom[1])
    assert c != U3F2.identity
    assert all(U3F2.commutator(hom[i], hom[j]) == c
               for i in range(3) for j in range(i + 1, 3))
    assert not in_kernel_filtration(inst)


def test_violates_kernel_property_main():
    inst = build_instance(2, 9, [("u3f2", U3F2)])
    rep = violates_kernel_property(inst, 3)
    assert rep.status == VIOLATED
    assert rep.commutator_outside_g3 and rep.commutator_in_kernel_filtration
    # Violation at level 3 propagates to all n >= 3.
    assert violates_kernel_property(inst, 5).status == VIOLATED
    with pytest.raises(BadParams):
        violates_kernel_property(inst, 2)


def test_violates_kernel_property_inconclusive():
    # Pigeonhole needs N > |H|.
    inst = build_instance(2, 4, [("u3f2", U3F2)])
    assert violates_kernel_property(inst, 3).status == INCONCLUSIVE


def test_violates_kernel_property_not_violated():
    # With no targets the kernel filtration is everything, vacuously; the
    # instance still reports correctly (pigeonhole trivially holds).
    inst = build_instance(2, 3, [])
    rep = violates_kernel_property(inst, 3)
    assert rep.status == VIOLATED  # vacuous kernel side, commutator outside


def test_pigeonhole_in_enumerated_homs():
    # Every hom tuple for N > |H| repeats a generator image.
    inst = build_instance(2, 5, [("c4", cyclic_group(4))])
    homs = enumerate_homs(inst.presentation, cyclic_group(4))
    assert homs
    assert all(len(set(t)) < len(t) for t in homs)


def test_max_constant_commutator_clique():
    # Exhaustive over U_3(F_2): the bound from the appendix instance.
    best = max_constant_commutator_tuple(U3F2)
    assert best <= 8
    assert best == 3


def test_mpks_target_counterexample_scale():
    # L = {Z/p^2, M_{p^3}} with N > p^3: both targets force the
    # commutator into every kernel.
    from unipotent_lab.famgroups import mpks_group
    m27 = mpks_group(3, 1, 1).group
    inst = build_instance(3, 28, [("c9", cyclic_group(9)), ("m27", m27)])
    rep = violates_kernel_property(inst, 3)
    assert rep.status == VIOLATED


def test_budget_guard():
    inst = build_instance(2, 9, [("u3f2", U3F2)])
    with pytest.raises(TooLarge):
        hom_counts(inst, Caps(hom_search_nodes=1000))
