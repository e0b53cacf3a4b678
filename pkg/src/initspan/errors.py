"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage problems exit 1, data problems
(ParseError / IntegrityError) exit 2, numerical failures exit 3.
"""


class InitspanError(Exception):
    """Base class for all toolkit errors."""


class ParseError(InitspanError):
    """A record in an input file could not be parsed.

    Carries the 1-based line number of the offending record when known.
    """

    def __init__(self, message, line_no=None, path=None):
        self.line_no = line_no
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_no is not None:
            where += f"{line_no}:"
        super().__init__(f"{where} {message}" if where else message)


class IntegrityError(InitspanError):
    """Input parsed but violates a structural invariant (contiguity, overlap, range)."""


class NumericalError(InitspanError):
    """A numerical computation produced a non-finite or otherwise invalid result."""
