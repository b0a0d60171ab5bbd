"""Exact-arithmetic workbench for group filtrations, unipotent matrix
representations and Massey products.

Everything here computes over exact coefficient rings (prime fields,
Z/p^r, arbitrary-precision integers); there is no floating point in any
verdict path.
"""

__version__ = "0.1.0"

from .errors import (
    BadParams,
    BadSize,
    BadTarget,
    BadWord,
    NoFiniteOrder,
    NotAUnit,
    NoWitness,
    SpecMismatch,
    TooLarge,
    UnipotentLabError,
)
from .residue import RingElem, RingSpec, reduce, val_p

__all__ = [
    "__version__",
    "BadParams",
    "BadSize",
    "BadTarget",
    "BadWord",
    "NoFiniteOrder",
    "NotAUnit",
    "NoWitness",
    "SpecMismatch",
    "TooLarge",
    "UnipotentLabError",
    "RingElem",
    "RingSpec",
    "reduce",
    "val_p",
]
