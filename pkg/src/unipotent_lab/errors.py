"""Exception hierarchy shared by all modules."""


class UnipotentLabError(Exception):
    """Base class for every error raised by this package."""


class SpecMismatch(UnipotentLabError):
    """Binary operation over values with different ring/shape specs."""


class NotAUnit(UnipotentLabError):
    """Inversion requested for an element whose constant term is not a unit."""


class BadWord(UnipotentLabError):
    """Malformed word, or generator index out of range."""


class NoWitness(UnipotentLabError):
    """The element lies in the subgroup; no separating witness exists.

    This is the contract for membership, not an internal failure.
    """


class TooLarge(UnipotentLabError):
    """A configured size or search budget would be exceeded."""


class BadParams(UnipotentLabError):
    """Parameters outside the domain of a family or construction."""


class BadTarget(UnipotentLabError):
    """Invalid conjugation target / prime combination."""


class BadSize(UnipotentLabError):
    """Matrix size mismatch in an embedding or projection."""


class NoFiniteOrder(UnipotentLabError):
    """order() requested over the integers for a non-identity matrix."""
