"""Exception hierarchy shared by every fluxlogic module."""


class FluxLogicError(Exception):
    """Base class for all library errors."""


class NetworkError(FluxLogicError, ValueError):
    """Invalid network construction: unknown cell, self-coupling, bad bias."""


class AssignmentError(FluxLogicError, KeyError):
    """An assignment does not resolve every cell of a network."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ParameterError(FluxLogicError, ValueError):
    """Gate parameters outside their operating range."""


class SolverLimitError(FluxLogicError):
    """Exact enumeration would exceed the configured block size."""


class ParseError(FluxLogicError, ValueError):
    """Malformed netlist or DIMACS text; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
