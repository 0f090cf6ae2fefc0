"""Exception types shared across the package."""


class OmxError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(OmxError, ValueError):
    """Operands have incompatible or unexpected dimensions."""


class ParameterError(OmxError, ValueError):
    """An argument is outside its valid range."""


class DomainError(OmxError, ValueError):
    """A value violates a mathematical domain requirement (e.g. negative count)."""


class NotFittedError(OmxError, RuntimeError):
    """A model method requiring a completed fit was called before fitting."""


class FormatError(OmxError, ValueError):
    """A file does not conform to its declared format."""


class IntegrityError(OmxError, ValueError):
    """A file parsed but its self-declared invariants do not hold."""
