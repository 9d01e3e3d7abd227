"""Exception hierarchy for qcurv.

Every error raised on purpose by the library derives from :class:`QCurvError`.
Errors that describe a bad input (as opposed to a broken internal invariant)
also derive from :class:`InputError`; the CLI maps those to exit code 1.
"""


class QCurvError(Exception):
    """Base class for all qcurv errors."""


class InputError(QCurvError):
    """The caller supplied data outside an operation's domain."""


class InvariantViolation(QCurvError):
    """An internal consistency check failed (never expected)."""


class CharacteristicMismatch(InputError):
    pass


class OrderDivisibleByChar(InputError):
    def __init__(self, n, p):
        super().__init__(f"order {n} is divisible by the characteristic {p}")
        self.n = n
        self.p = p


class BadReduction(InputError):
    def __init__(self, n, detail=""):
        msg = f"bad reduction at the cyclotomic place of order {n}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.n = n


class NotInvertible(InputError):
    pass


class ZeroInput(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class SingularGauge(InputError):
    pass


class SingularSystem(InputError):
    pass


class PrimeTooSmall(InputError):
    def __init__(self, ell, degree):
        super().__init__(f"prime {ell} violates 2*{degree} < {ell} - 1")
        self.ell = ell
        self.degree = degree


class UnsupportedShape(InputError):
    pass


class NotConstant(InputError):
    pass


class PoleAtZero(InputError):
    pass


class Resonant(InputError):
    """Raised when the recursion for series coefficients cannot be solved.

    ``where`` is either the offending order ``n`` (an int) or a pair of
    eigenvalues whose ratio lies in q^Z.
    """

    def __init__(self, where):
        if isinstance(where, tuple):
            shown = "(" + ", ".join(str(w) for w in where) + ")"
        else:
            shown = f"order {where}"
        super().__init__(f"resonance at {shown}")
        self.where = where


class NoMatch(QCurvError):
    """Rational reconstruction failed or produced an unverifiable candidate."""


class NotRegularSingularAtZero(InputError):
    """The system is certified irregular at x = 0."""


class ShearingUnresolved(NotRegularSingularAtZero):
    """The shearing loop gave up; the system may or may not be regular."""


class EigenUnresolved(InputError):
    """A(0) could not be brought to the identity over k(q)."""


class NoConfluence(InputError):
    pass


class ExpressionSyntaxError(InputError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class DivisionByZeroExpression(InputError):
    pass


class UnknownCommand(InputError):
    pass


class FlagConflict(InputError):
    pass
