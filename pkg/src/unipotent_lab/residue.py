"""Exact coefficient rings: F_p, Z/p^r and arbitrary-precision integers.

A :class:`RingSpec` names the ring, a :class:`RingElem` is a canonical
residue in it.  All arithmetic is exact; there is no floating point.
The ``Zmod`` kind with exponent 1 is canonically identified with the
prime field, so ``RingSpec.mod_prime_power(p, 1) == RingSpec.prime_field(p)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import BadParams, NotAUnit, SpecMismatch

INFINITY = math.inf

FP = "fp"
ZMOD = "zmod"
INTEGERS = "z"

_SPEC_RE = re.compile(r"^(Fp:(\d+)|Zmod:(\d+)\^(\d+)|Z)$")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """One of F_p, Z/p^r, or the ring of integers."""

    kind: str
    p: int | None = None
    r: int | None = None

    @classmethod
    def prime_field(cls, p: int) -> "RingSpec":
        if not is_prime(p):
            raise BadParams(f"{p} is not prime")
        return cls(FP, p, 1)

    @classmethod
    def mod_prime_power(cls, p: int, r: int) -> "RingSpec":
        if not is_prime(p):
            raise BadParams(f"{p} is not prime")
        if r < 1:
            raise BadParams(f"exponent must be >= 1, got {r}")
        if r == 1:
            return cls.prime_field(p)
        return cls(ZMOD, p, r)

    @classmethod
    def integers(cls) -> "RingSpec":
        return cls(INTEGERS)

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        """Parse the CLI syntax: ``Fp:3``, ``Zmod:3^2``, ``Z``."""
        m = _SPEC_RE.match(text.strip())
        if not m:
            raise BadParams(f"cannot parse ring spec {text!r}")
        if m.group(2):
            return cls.prime_field(int(m.group(2)))
        if m.group(3):
            return cls.mod_prime_power(int(m.group(3)), int(m.group(4)))
        return cls.integers()

    def __str__(self) -> str:
        if self.kind == FP:
            return f"Fp:{self.p}"
        if self.kind == ZMOD:
            return f"Zmod:{self.p}^{self.r}"
        return "Z"

    @property
    def modulus(self) -> int | None:
        """p^r for the finite kinds, None over the integers."""
        if self.kind == INTEGERS:
            return None
        return self.p ** self.r

    @property
    def is_finite(self) -> bool:
        return self.kind != INTEGERS

    def reduce_int(self, x: int) -> int:
        """Canonical representative of x: in [0, p^r), or x itself over Z."""
        m = self.modulus
        return x if m is None else x % m

    def is_unit(self, x: int) -> bool:
        if self.kind == INTEGERS:
            return x in (1, -1)
        return self.reduce_int(x) % self.p != 0

    def inv(self, x: int) -> int:
        if not self.is_unit(x):
            raise NotAUnit(f"{x} is not a unit in {self}")
        if self.kind == INTEGERS:
            return x
        return pow(x, -1, self.modulus)


@dataclass(frozen=True)
class RingElem:
    """A canonical residue paired with its spec."""

    spec: RingSpec
    value: int

    def _check(self, other: "RingElem") -> None:
        if self.spec != other.spec:
            raise SpecMismatch(f"{self.spec} vs {other.spec}")

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(self.spec, self.spec.reduce_int(self.value + other.value))

    def __sub__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(self.spec, self.spec.reduce_int(self.value - other.value))

    def __mul__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(self.spec, self.spec.reduce_int(self.value * other.value))

    def __neg__(self) -> "RingElem":
        return RingElem(self.spec, self.spec.reduce_int(-self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return self.spec.is_unit(self.value)

    def inverse(self) -> "RingElem":
        return RingElem(self.spec, self.spec.inv(self.value))

    def __str__(self) -> str:
        return str(self.value)


def reduce(x: int, spec: RingSpec) -> RingElem:
    """Canonical residue of the integer x in the given ring."""
    return RingElem(spec, spec.reduce_int(x))


def val_p(x: int, p: int) -> int | float:
    """p-adic valuation: largest e with p^e | x; Infinity iff x == 0."""
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    if x == 0:
        return INFINITY
    x = abs(x)
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e
