"""
Exception hierarchy shared by every module of the package.

Each class also derives from the builtin exception a caller would expect
(``ValueError`` for bad data, ``OSError`` for file problems,
``ArithmeticError`` for solver failures), so plain ``except ValueError``
blocks keep working.
"""


class MinkowskiError(Exception):
    """Root of all package errors."""


class ValidationError(MinkowskiError, ValueError):
    """An input violates a documented invariant."""


class OddOrderError(ValidationError):
    """
    An odd Minkowski order was given where a usable transform order is needed.

    The gradient polynomial of an odd order has no real root inside (0, 1)
    for 0 < mu < 1, its roots are complex, so the result can't be used as a
    probability during inference.
    """

    def __init__(self, order):
        self.order = order
        super().__init__(
            f"loss order {order} is odd: its expected-loss gradient polynomial "
            f"has complex roots for 0 < mu < 1, so the result can't be used as "
            f"a probability (use analyze_odd_order to inspect the roots)"
        )


class InstanceTooLargeError(ValidationError):
    """The exhaustive decoding oracle refused an instance above its guard."""


class FormatError(ValidationError):
    """
    Malformed file content.

    Attributes
    ----------
    path : str or None
        File being read, when known.
    line : int or None
        1-based line number of the offending content, when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = None if path is None else str(path)
        self.line = line
        where = ''
        if self.path is not None:
            where = self.path
            if line is not None:
                where += f':{line}'
            where += ': '
        elif line is not None:
            where = f'line {line}: '
        super().__init__(where + message)


class MalformedHeaderError(FormatError):
    pass


class RowLengthError(FormatError):
    pass


class RowCountError(FormatError):
    pass


class RowSumError(FormatError):
    pass


class NonNumericTokenError(FormatError):
    pass


class ProbabilityRangeError(FormatError):
    pass


class HmmFormatError(FormatError):
    pass


class ManifestError(FormatError):
    pass


class EncodingError(FormatError):
    """File content is not valid UTF-8."""


class DataIOError(MinkowskiError, OSError):
    """A file could not be read or written."""


class ConvergenceError(MinkowskiError, ArithmeticError):
    """
    Newton root finding hit its iteration limit.

    Attributes
    ----------
    last_iterate : float
        The last point visited by the solver.
    residual : float
        Gradient polynomial value at ``last_iterate``.
    iterations : int
        Number of iterations performed.
    """

    def __init__(self, last_iterate, residual, iterations):
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"Newton solver did not converge after {iterations} iterations "
            f"(last iterate {last_iterate!r}, residual {residual!r})"
        )
