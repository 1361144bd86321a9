from __future__ import annotations


class DgCalcError(Exception):
    """Base class for every error raised by dgcalc."""


class InputError(DgCalcError):
    """Malformed user input, optionally located by line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.line is None:
            return self.message if self.column is None else f"column {self.column}: {self.message}"
        if self.column is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, column {self.column}: {self.message}"

    def at(self, line: int, column: int | None = None) -> "InputError":
        if self.line is None:
            self.line = line
            if column is not None:
                self.column = column
            self.args = (str(self),)
        return self


class ParseError(InputError):
    kind = "syntax error"


class UnknownIdentifierError(InputError):
    kind = "unknown identifier"


class DegreeError(InputError):
    kind = "degree violation"


class CohomologicalError(InputError):
    kind = "D^2 failure"


class NameClashError(InputError):
    kind = "name clash"


class ChainConditionError(InputError):
    kind = "chain condition"


class UniverseMismatchError(DgCalcError):
    pass


class MissingAssignmentError(DgCalcError):
    pass


class NonClassicalPointError(DgCalcError):
    pass


class ChainMapError(DgCalcError):
    pass


class OracleLimitError(DgCalcError):
    pass
