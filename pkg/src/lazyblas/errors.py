"""Exception hierarchy shared across the library."""


class ArityError(TypeError):
    """Wrong number of extents or indices for the tensor's rank."""


class DomainError(ValueError):
    """Argument outside its allowed domain (negative extent, bad dimension, ...)."""


class BoundsError(IndexError):
    """Index outside the extent of its dimension."""


class RankError(TypeError):
    """A rank-specific operation was called on a tensor of another rank."""


class ShapeError(ValueError):
    """Operand shapes do not satisfy the operation's contract."""


class UnsupportedOperationError(TypeError):
    """Operation not expressible in this framework (e.g. transpose of rank-3)."""


class AliasingError(ValueError):
    """Destination tensor also appears as a multiplicand operand."""


class UnknownBackendError(ValueError):
    """Backend name not present in the registry."""
