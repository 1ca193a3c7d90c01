class LogFormsError(Exception):
    """Base class for errors raised by logforms."""


class PreconditionError(LogFormsError, ValueError):
    """An input violates the precondition of an operation."""


class FieldMismatchError(PreconditionError):
    """Two values live over different FieldSpecs."""


class DependentBasisError(PreconditionError):
    """A candidate basis is F_p-linearly dependent."""


class NeedsLargerFieldError(PreconditionError):
    """A construction needs points outside the working field F_{p^k}."""


class InternalInconsistencyError(LogFormsError, AssertionError):
    """A computed invariant failed; this indicates a bug, not bad input."""
