class RgError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(RgError):
    """Invalid state-space configuration (empty domain, state cap exceeded, ...)."""


class SpaceMismatchError(RgError):
    """Two operands were built over different state spaces."""


class UnknownVariableError(RgError):
    """A variable name is not declared in the state space."""


class EvaluationError(RgError):
    """An operator table has no entry for the operand value(s)."""


class UnboundFixpointError(RgError):
    """A fixpoint variable occurs outside any enclosing mu/nu binder."""


class ParseError(RgError):
    """Syntax error in predicate, expression, command or space text."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
