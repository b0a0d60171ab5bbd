"""Acceptance suite: one test per criterion, exact arithmetic throughout.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``)
and enforces the criterion's wall-clock budget.
"""

import itertools
import random
import time
from contextlib import contextmanager

import pytest

from conftest import random_word
from unipotent_lab import massey
from unipotent_lab.appendix import (
    build_instance,
    in_kernel_filtration,
    not_in_g3,
    violates_kernel_property,
)
from unipotent_lab.famgroups import (
    minimal_embedding,
    mpks_group,
    power_character_rep,
    rigid_quotient,
    verify_kernel_property,
)
from unipotent_lab.fingrp import (
    abelian_group,
    compare_filtrations,
    cyclic_group,
    enumerate_homs,
    series,
    trivial_group,
    unitriangular_group,
)
from unipotent_lab.freewords import Filtration, in_filtration, rho_I, witness_rep
from unipotent_lab.errors import NoWitness
from unipotent_lab.massey import Character, cross_check, dwyer_search
from unipotent_lab.residue import RingSpec
from unipotent_lab.unimat import UniMat, centralizer_of_X, solve_conjugation


@contextmanager
def criterion(number: int, name: str, budget_s: float):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} ({name}): FAIL")
        raise
    elapsed = time.monotonic() - start
    status = "PASS" if elapsed < budget_s else "FAIL (over budget)"
    print(f"ACCEPTANCE {number} ({name}): {status} [{elapsed:.1f}s < {budget_s:.0f}s]")
    assert elapsed < budget_s


def _witness_spec(filt, n, k):
    if filt.kind == "zassenhaus":
        return RingSpec.prime_field(filt.p)
    if filt.kind == "lower-central":
        return RingSpec.integers()
    return RingSpec.mod_prime_power(filt.p, n - k)


def test_criterion_1_free_group_kernel_theorems():
    with criterion(1, "free-group kernel theorems", 60):
        rng = random.Random(1729)
        filtrations = [
            Filtration("lower-central"),
            Filtration("zassenhaus", 2), Filtration("zassenhaus", 3),
            Filtration("p-central", 2), Filtration("p-central", 3),
        ]
        for _ in range(500):
            d = rng.randint(1, 3)
            w = random_word(rng, d, 4)
            for filt in filtrations:
                for n in range(1, 6):
                    if in_filtration(w, filt, n):
                        for k in range(1, n):
                            for I in itertools.product(range(1, d + 1), repeat=k):
                                spec = _witness_spec(filt, n, k)
                                assert rho_I(w, I, spec).is_identity()
                        with pytest.raises(NoWitness):
                            witness_rep(w, filt, n)
                    else:
                        wit = witness_rep(w, filt, n)
                        assert not wit.matrix.is_identity()
                        assert wit.corner != 0


def test_criterion_2_matrix_triviality_lemma():
    with criterion(2, "matrix triviality lemma", 120):
        # U_r(Z/p^s) has trivial p-central term at level r+s-1, for every
        # (p, r, s) with group order at most 1024.
        checked = 0
        for p in (2, 3):
            for r in itertools.count(2):
                if p ** (r * (r - 1) // 2) > 1024:
                    break
                for s in itertools.count(1):
                    size = p ** (s * r * (r - 1) // 2)
                    if size > 1024:
                        break
                    G = unitriangular_group(r, RingSpec.mod_prime_power(p, s))
                    table = series(G, "p-central", p, upto=r + s - 1)
                    assert table.is_trivial_at(r + s - 1), (p, r, s)
                    checked += 1
        assert checked >= 9  # at least (2,2,1..3),(2,3,1..2),(2,4,1),(3,2,1..2),(3,3,1)

        # Zassenhaus: U_n(F_p) trivial at level n, n <= 4.
        for p in (2, 3):
            for n in (2, 3, 4):
                G = unitriangular_group(n, RingSpec.prime_field(p))
                assert series(G, "zassenhaus", p, upto=n).is_trivial_at(n)

        # Lower central over Z, checked on Z/p^M truncations: level n trivial.
        for n, p, M in ((2, 2, 5), (3, 2, 3), (3, 3, 2), (4, 2, 1), (4, 3, 1)):
            G = unitriangular_group(n, RingSpec.mod_prime_power(p, M))
            assert series(G, "lower-central", None, upto=n).is_trivial_at(n)


def test_criterion_3_conjugator_and_order():
    with criterion(3, "conjugator and order", 10):
        def mult_order(a, m):
            e, x = 1, a % m
            while x != 1:
                x = x * a % m
                e += 1
            return e

        for p in (2, 3, 5, 7):
            for s in (1, 2, 3):
                n = p ** s + 1
                if n > 10:
                    continue
                for k in range(1, s + 1):
                    conj = solve_conjugation("power", p, s, k)
                    A, B = conj.A, conj.B
                    assert A.n == n
                    assert all(A.entry(i, n) == 0 for i in range(1, n))
                    assert A * B * A.inverse() == B ** (1 + p ** k)
                    # Order: p^(s+1-k) for odd p; at p = 2 the true order
                    # is the multiplicative order of 1+2^k mod 2^(s+1),
                    # which is smaller when k = 1 and s >= 2 (pinned by
                    # test_order_formula_fails_at_p2_k1).
                    expected = mult_order(1 + p ** k, p ** (s + 1))
                    if p != 2:
                        assert expected == p ** (s + 1 - k)
                    assert A.order() == expected
                # k > s collapses to the identity.
                conj = solve_conjugation("power", p, s, s + 1)
                assert conj.A.is_identity()
                if p == 2:
                    inv = solve_conjugation("inverse", 2, s)
                    assert inv.A * inv.B * inv.A.inverse() == inv.B ** -1
                    for k in range(1, s + 1):
                        neg = solve_conjugation("negpower", 2, s, k)
                        assert neg.A * neg.B * neg.A.inverse() == \
                            neg.B ** -(1 + 2 ** k)


def test_criterion_4_centralizer_lemma():
    with criterion(4, "centralizer lemma", 5):
        from unipotent_lab.linalg import in_span, rank
        from unipotent_lab.unimat import mat_identity, mat_mul, mat_shift
        for p in (2, 3, 5):
            for n in range(2, 11):
                basis = centralizer_of_X(n, p)
                assert len(basis) == n
                flat = [[m[i][j] for i in range(n) for j in range(n)]
                        for m in basis]
                assert rank(flat, p) == n
                power = mat_identity(n)
                x = mat_shift(n)
                for _ in range(n):
                    vec = [power[i][j] for i in range(n) for j in range(n)]
                    assert in_span(flat, vec, p)
                    power = mat_mul(power, x, p)


def test_criterion_5_embedding_corollary():
    with criterion(5, "embedding corollary", 30):
        for p in (3, 5):
            for which in ("cyclic-p2", "mp3"):
                rep = minimal_embedding(which, p)
                assert rep.injective and rep.verified
                assert rep.n == p + 1
                assert rep.exponent_below == p
                assert rep.scanned_below == p ** (p * (p - 1) // 2)


def test_criterion_6_kernel_property_on_quotients():
    with criterion(6, "kernel property on quotients", 120):
        cases = [
            ("rigid", {"p": 3, "s": 1, "k": 1, "m": 1, "variant": "split"}, 4),
            ("rigid", {"p": 3, "s": 1, "k": 1, "m": 2, "variant": "split"}, 4),
            ("rigid", {"p": 3, "s": 1, "m": 1, "variant": "direct"}, 4),
            ("rigid", {"p": 3, "s": 1, "m": 2, "variant": "direct"}, 4),
            ("rigid", {"p": 2, "s": 1, "m": 2, "variant": "inv"}, 3),
            ("rigid", {"p": 2, "s": 1, "k": 1, "m": 2, "variant": "split"}, 3),
            ("demushkin", {"p": 3, "type": 1, "s": 1}, 4),
            ("demushkin", {"p": 3, "type": 2, "q": 3, "s": 1}, 4),
            ("demushkin", {"p": 2, "type": 3, "s": 1}, 3),
            ("demushkin", {"p": 2, "type": 4, "q": 4, "s": 1}, 3),
        ]
        for kind, params, n in cases:
            rep = verify_kernel_property(kind, params, n)
            assert rep.ok, (kind, params, n)
            assert rep.series_trivial and rep.all_separated and rep.homs_verified


def test_criterion_7_massey_examples():
    with criterion(7, "massey examples", 60):
        Z3 = cyclic_group(3)
        id3 = Character.from_gen_values(Z3, 3, [1])
        assert dwyer_search(Z3, [id3] * 3, 3).status == massey.DEFINED_NOT_VANISHING

        Z5 = cyclic_group(5)
        id5 = Character.from_gen_values(Z5, 5, [1])
        assert dwyer_search(Z5, [id5] * 5, 5).status == massey.DEFINED_NOT_VANISHING

        Z2 = cyclic_group(2)
        id2 = Character.from_gen_values(Z2, 2, [1])
        assert dwyer_search(Z2, [id2] * 4, 4).status == massey.UNDEFINED

        Z9 = cyclic_group(9)
        red = Character.from_gen_values(Z9, 3, [1])
        verdict = dwyer_search(Z9, [red] * 3, 3)
        assert verdict.status == massey.VANISHING
        # With the superdiagonal carrying -alpha, the generator -> B
        # witness appears for the negated characters; the verdicts agree
        # by linearity.
        neg = dwyer_search(Z9, [red.scale(-1)] * 3, 3)
        assert neg.status == massey.VANISHING
        B = UniMat.one_plus_shift(4, RingSpec.prime_field(3))
        assert neg.lift_witness[0] == B


def test_criterion_8_dwyer_cross_check():
    with criterion(8, "dwyer cross-check", 600):
        groups = [
            (trivial_group(), 2),
            (cyclic_group(2), 2),
            (cyclic_group(3), 3),
            (cyclic_group(4), 2),
            (abelian_group([2, 2]), 2),
        ]
        for G, p in groups:
            chars = massey.all_characters(G, p)
            for triple in itertools.product(chars, repeat=3):
                res = cross_check(G, list(triple), 3)
                assert res.ok, (G.name, [a.on_gens() for a in triple])
        Z3 = cyclic_group(3)
        id3 = Character.from_gen_values(Z3, 3, [1])
        res = cross_check(Z3, [id3] * 3, 3)
        assert res.ok and res.dwyer.status == massey.DEFINED_NOT_VANISHING


def test_criterion_9_power_character_constructions():
    with criterion(9, "power character constructions", 5):
        for case in ("case0", "case1", "case2"):
            rep = power_character_rep(3, 1, 1, case)
            assert rep.verified
            expected = ((1, 1, 1),) if case != "case1" else ((1, 1, 1), (0, 0, 0))
            assert rep.superdiagonal == expected


def test_criterion_10_appendix_counterexample():
    with criterion(10, "appendix counterexample", 300):
        U3F2 = unitriangular_group(3, RingSpec.prime_field(2))
        inst = build_instance(2, 9, [("u3f2", U3F2)])
        assert not_in_g3(inst)
        assert in_kernel_filtration(inst)
        rep = violates_kernel_property(inst, 3)
        assert rep.status == "violated"
        # Full enumeration completes within budget; spot-check the
        # pigeonhole on a sample and the tuple count is positive.
        homs = enumerate_homs(inst.presentation, U3F2)
        assert len(homs) > 0
        assert all(len(set(t)) < len(t) for t in homs[:1000])
        assert all(len(set(t)) < len(t) for t in homs[::1000])


def test_criterion_11_filtration_comparison():
    with criterion(11, "filtration comparison", 60):
        F2 = RingSpec.prime_field(2)
        F3 = RingSpec.prime_field(3)
        samples = [
            (unitriangular_group(3, F2), 2),
            (unitriangular_group(4, F2), 2),
            (unitriangular_group(3, F3), 3),
            (mpks_group(3, 1, 1).group, 3),
            (rigid_quotient(3, 1, 1, "split", 1).group, 3),
        ]
        for G, p in samples:
            rep = compare_filtrations(G, p, 4)
            assert all(rep.pcentral_in_zassenhaus), G.name
            assert rep.zassenhaus_p_plus_1_in_pcentral_3, G.name
            if p == 2:
                assert rep.level3_equal is True, G.name
            assert rep.ok
