"""Exception hierarchy shared by every laxrel module."""


class LaxRelError(Exception):
    """Base class for all library errors."""


class QuantaleError(LaxRelError):
    """Invalid quantale description (bad monoid table, bad grid size, ...)."""


class MismatchError(LaxRelError):
    """Relations, maps or functors that do not fit together."""


class InfiniteCarrier(LaxRelError):
    """An operation needs to enumerate a carrier that is infinite."""


class CapExceeded(LaxRelError):
    """A materialised set would exceed the configured size cap."""

    def __init__(self, what, size, cap):
        super().__init__(f"enumeration too large: {what} has {size} elements (cap {cap})")
        self.what = what
        self.size = size
        self.cap = cap


class IterationBoundExceeded(LaxRelError):
    """A fixpoint iteration did not stabilise within its bound."""


class NotFullyFaithful(LaxRelError):
    def __init__(self, pair, lhs, rhs):
        super().__init__(f"embedding is not fully faithful at {pair!r}: {lhs} != {rhs}")
        self.pair = pair


class LibraryBug(LaxRelError, AssertionError):
    """Two computations that must agree mathematically gave different answers."""
