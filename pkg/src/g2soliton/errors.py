"""Exception hierarchy shared by all modules."""


class G2Error(Exception):
    """Base class for every error raised by the package."""


class InputError(G2Error, ValueError):
    """Malformed or out-of-range input (dimension mismatch, bad grade, bad parameter)."""


class ParseError(InputError):
    """Syntax error in a problem file or form expression."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}, column {column}: " if column is not None else f"line {line}: "
        super().__init__(loc + message)


class NotALieAlgebraError(InputError):
    """Structure equations violate d^2 = 0 (the Jacobi identity)."""

    def __init__(self, covector, residual):
        self.covector = covector
        self.residual = residual
        super().__init__(
            f"not a Lie algebra: d(de^{covector}) != 0 (residual {residual:.3e})"
        )


class NotPositiveError(G2Error):
    """A 3-form failing the G2 positivity conditions.

    ``condition`` is one of ``"determinant"``, ``"definiteness"`` or
    ``"orientation"``; ``witness`` is the determinant or the offending
    eigenvalue.
    """

    def __init__(self, condition, witness, hint=""):
        self.condition = condition
        self.witness = witness
        self.hint = hint
        msg = f"3-form is not positive: {condition} condition failed (witness {witness:.6g})"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class NotClosedError(G2Error):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"3-form is not closed: ||d phi||_inf = {residual:.3e}")


class NumericError(G2Error, ArithmeticError):
    """Numerical failure: singular solve, method disagreement, positivity lost."""
