"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ShapeError(ValueError):
    """Operands have incompatible dimensions."""


class DataError(ValueError):
    """Matrix data violates a physical constraint (e.g. negative populations)."""


class UnsupportedError(ValueError):
    """The operation is not defined for this system size or local dimension."""


class CapacityError(RuntimeError):
    """A dense representation would exceed the configured size limit."""


class BracketError(RuntimeError):
    """A root-finding bracket does not contain a sign change."""
