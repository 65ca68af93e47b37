"""Exception types shared across modules; the CLI maps them to exit codes."""


class ParseError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at offset {offset})")
        self.offset = offset


class IntegrityError(ValueError):
    """Input data violates a structural invariant."""


class DomainError(ValueError):
    """Evaluation at a pole or outside the allowed branch."""


class SolverError(RuntimeError):
    """A numeric or linear solve failed to produce a valid answer."""
