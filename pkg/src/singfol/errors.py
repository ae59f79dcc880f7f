"""Exception hierarchy. Every error carries a machine-readable ``code``."""


class SingfolError(Exception):
    code = "error"
    exit_code = 1


class StructuralError(SingfolError, ValueError):
    """Mismatched ranks, variable counts or dimensions."""

    code = "structural"
    exit_code = 3


class PreconditionError(SingfolError):
    code = "precondition"
    exit_code = 3


class UnsupportedMapError(PreconditionError):
    code = "unsupported_map"


class NeedsGenerators(PreconditionError):
    """Degree cap exhausted before projectable generators were found."""

    code = "needs_generators"


class DivergenceError(SingfolError, ArithmeticError):
    code = "divergence"
    exit_code = 5


class TransportError(SingfolError):
    """Holonomy transport lost transversality on some path segment."""

    code = "transport"
    exit_code = 5

    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


class ParseError(SingfolError, ValueError):
    code = "parse"
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.message = message
