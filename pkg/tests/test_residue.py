import random

import pytest

from unipotent_lab.errors import BadParams, NotAUnit, SpecMismatch
from unipotent_lab.residue import INFINITY, RingSpec, reduce, val_p

F3 = RingSpec.prime_field(3)
Z9 = RingSpec.mod_prime_power(3, 2)
Z = RingSpec.integers()


def test_reduce_examples():
    assert reduce(7, F3).value == 1
    assert reduce(-1, Z9).value == 8
    assert reduce(12, Z).value == 12


def test_val_p_examples():
    assert val_p(12, 2) == 2
    assert val_p(9, 3) == 2
    assert val_p(0, 5) == INFINITY


def test_prime_field_is_zmod_r1():
    assert RingSpec.mod_prime_power(5, 1) == RingSpec.prime_field(5)


def test_parse_round_trip():
    for text in ("Fp:3", "Zmod:3^2", "Z"):
        assert str(RingSpec.parse(text)) == text
    assert RingSpec.parse("Zmod:7^1") == RingSpec.prime_field(7)
    with pytest.raises(BadParams):
        RingSpec.parse("Fp:4")
    with pytest.raises(BadParams):
        RingSpec.parse("Q")


def test_spec_mismatch():
    with pytest.raises(SpecMismatch):
        reduce(1, F3) + reduce(1, Z9)


def test_ring_axioms_random():
    rng = random.Random(7)
    for spec in (F3, Z9, RingSpec.prime_field(2), Z):
        for _ in range(200):
            a, b, c = (reduce(rng.randint(-50, 50), spec) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a + (-a) == reduce(0, spec)


def test_valuation_multiplicative():
    rng = random.Random(11)
    for _ in range(200):
        x = rng.randint(1, 10 ** 6)
        y = rng.randint(1, 10 ** 6)
        for p in (2, 3, 5):
            assert val_p(x * y, p) == val_p(x, p) + val_p(y, p)


def test_units_and_inverses():
    assert reduce(2, Z9).is_unit()
    assert not reduce(3, Z9).is_unit()
    assert reduce(2, Z9).inverse() * reduce(2, Z9) == reduce(1, Z9)
    assert reduce(-1, Z).inverse() == reduce(-1, Z)
    with pytest.raises(NotAUnit):
        reduce(2, Z).inverse()


def test_val_p_requires_prime():
    with pytest.raises(BadParams):
        val_p(10, 6)
