"""Exception hierarchy shared by every layer of the package."""


class ArgLtsError(Exception):
    """Base class for all errors raised by arglts."""

    exit_code = 1


class DomainError(ArgLtsError, ValueError):
    """An input violates a documented precondition."""


class ParseError(DomainError):
    """Malformed text input. Carries a 1-based line/column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class CapacityError(ArgLtsError):
    """A brute-force routine was asked to exceed its configured size limit."""

    exit_code = 2


class BudgetError(ArgLtsError):
    """A cascade did not reach a quiescent state within the horizon."""

    exit_code = 2


class ConflictError(ArgLtsError):
    """Simultaneous events carry complementary effect literals."""


class IntegrityError(ArgLtsError):
    """A state violates an invariant the engine is meant to guarantee."""

    exit_code = 3
