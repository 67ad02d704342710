"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class Loop2BulkError(Exception):
    """Base class for all errors raised by this package."""


# front end

class SourceError(Loop2BulkError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


class LexError(SourceError):
    pass


class ParseError(SourceError):
    pass


class ScopeError(SourceError):
    pass


# analysis / rewriting

class NotAffine(Loop2BulkError):
    """A loop was handed to a transformation that requires an accepted loop."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class NotApplicable(Loop2BulkError):
    """An optimization rule was applied outside its guard."""


class UnsupportedStatement(Loop2BulkError):
    pass


class RegistrationError(Loop2BulkError):
    """A commutative operator failed its algebraic-law check."""


# evaluation

class EvalError(Loop2BulkError):
    pass


class UnboundVariable(EvalError):
    pass


class IndexUnset(EvalError):
    pass


class DivisionByZero(EvalError):
    pass


class TypeMismatch(EvalError):
    pass


class DuplicateKey(EvalError):
    pass


class NonSingletonScalar(EvalError):
    pass


class NonBooleanCond(EvalError):
    pass


class EmptyReduction(EvalError):
    pass
