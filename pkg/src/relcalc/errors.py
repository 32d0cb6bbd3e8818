class RelcalcError(Exception):
    """Base class for errors raised by relcalc."""


class ParseError(RelcalcError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class TranslationError(RelcalcError):
    """A translation precondition does not hold (semantic rejection)."""


class BudgetExceeded(RelcalcError):
    """An enumeration or construction would exceed its configured bound."""


class EvaluationError(RelcalcError):
    """A formula or term mentions a symbol the structure does not interpret."""
