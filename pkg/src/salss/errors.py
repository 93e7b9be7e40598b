"""Exception types shared across the package."""


class SaError(Exception):
    pass


class ModelError(SaError):
    """A model or valuation refers to something that does not exist."""


class NotFound(SaError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "not found"


class ContractViolation(SaError):
    """An operation was called outside its precondition."""


class Timelock(SaError):
    """No jump is enabled and no edge will ever become enabled."""


class ParseError(SaError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class InvalidModel(SaError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"{v.code}: {v.message}" for v in self.violations))


class TruncationError(SaError):
    """Strict estimation hit the step bound on at least one run."""
