"""Exception hierarchy shared by every module."""


class QromliftError(Exception):
    """Base class for all library errors."""


class SignatureMismatch(QromliftError, ValueError):
    """Two objects disagree on (n, m) or on register sizes."""


class ConflictError(QromliftError, ValueError):
    """Two partial functions disagree on a common point."""

    def __init__(self, x: int, left: int, right: int):
        self.x = x
        self.left = left
        self.right = right
        super().__init__(f"partial functions conflict at x={x}: {left} != {right}")


class InconsistencyError(QromliftError, ValueError):
    """An oracle is not a member of Func(h) for the required h."""


class WidthMismatch(QromliftError, ValueError):
    """Identity extension requested with m != n."""


class BudgetExceeded(QromliftError):
    """Exact enumeration would exceed the configured budget."""

    def __init__(self, needed: int, budget: int, what: str = "oracles"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"enumerating {needed} {what} exceeds budget {budget}")


class NonUnitaryError(QromliftError, ValueError):
    pass


class NormViolation(QromliftError, ArithmeticError):
    pass


class QueryCountError(QromliftError):
    """A classical PRG did not make exactly Q_G distinct queries."""


class UndefinedDistribution(QromliftError):
    """A conditional distribution has an empty conditioning event."""


class DeterminismViolation(QromliftError):
    """An algorithm's canonical output has probability below 1 - delta."""


class ParseError(QromliftError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")
