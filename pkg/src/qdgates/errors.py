"""Exception hierarchy shared by all qdgates modules."""


class QDGatesError(Exception):
    """Base class for every error raised by this package."""


# state
class InconsistentSpinCount(QDGatesError, ValueError):
    pass


class NormExceedsOne(QDGatesError, ValueError):
    pass


class UnknownMode(QDGatesError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SpinIndexOutOfRange(QDGatesError, IndexError):
    pass


class ModeCollision(QDGatesError, ValueError):
    pass


class IncompatibleShapes(QDGatesError, ValueError):
    pass


class UncoveredMode(QDGatesError, ValueError):
    pass


class EmptyState(QDGatesError, ValueError):
    pass


# cavity
class DegenerateDenominator(QDGatesError, ZeroDivisionError):
    pass


# netlists
class NetlistError(QDGatesError, ValueError):
    """Raised when netlist text or structure is invalid."""


class NetlistSyntaxError(NetlistError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownKeyword(NetlistSyntaxError):
    pass


class DuplicateOutcomeLabel(NetlistError):
    pass


class UncoveredOutcome(NetlistError):
    pass


class DanglingMode(NetlistError):
    pass


# execution / metrics
class NonUnitInput(QDGatesError, ValueError):
    pass


class ZeroDetectionProbability(QDGatesError, ArithmeticError):
    pass


# cli input specs
class BadInputSpec(QDGatesError, ValueError):
    pass


class WrongLength(BadInputSpec):
    pass
