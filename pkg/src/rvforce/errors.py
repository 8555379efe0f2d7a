"""Exception hierarchy shared by all rvforce modules.

Every error carries a short machine-readable ``code`` so the CLI can print a
one-line ``error: <code>: <message>`` reason.
"""

from __future__ import annotations


class RVForceError(Exception):
    code = "error"


class ParseError(RVForceError, ValueError):
    """A formula or term could not be parsed."""

    code = "syntax"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownSymbolError(ParseError):
    code = "unknown-symbol"


class ArityError(ParseError):
    code = "arity"


class SpaceMismatchError(RVForceError, ValueError):
    code = "space-mismatch"


class UnboundVariableError(RVForceError, KeyError):
    code = "unbound-variable"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unbound variable"


class UndeclaredConstantError(RVForceError, KeyError):
    code = "undeclared"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "undeclared constant"


class EmptyFamilyError(RVForceError, ValueError):
    code = "empty-family"


class NotOpenError(RVForceError, ValueError):
    code = "not-open"


class FormulaClassError(RVForceError, ValueError):
    """Formula has the wrong quantifier shape for the requested operation."""

    code = "wrong-prefix"


class CircuitError(RVForceError, ValueError):
    code = "circuit"


class FiltrationError(RVForceError, ValueError):
    code = "filtration"


class CapExceededError(RVForceError, RuntimeError):
    """Family growth hit the configured size cap."""

    code = "cap-exceeded"

    def __init__(self, message: str, partial: list[str] | None = None):
        self.partial = list(partial or [])
        super().__init__(message)


class ScenarioError(RVForceError, ValueError):
    code = "scenario"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BoundsError(RVForceError, ValueError):
    """Demo parameters outside the supported range."""

    code = "bounds"
