"""Exception hierarchy shared by every module of the package."""


class SuperoptError(Exception):
    """Base class for all errors raised by superopt."""


class DegenerateInput(SuperoptError):
    pass


class NotPositive(SuperoptError):
    pass


class Asymmetric(SuperoptError):
    pass


class BoundaryRoot(SuperoptError):
    """A root sits too close to the unit circle to be classified as inner or outer."""


class NearZeroOnCircle(SuperoptError):
    pass


class GridTooSmall(SuperoptError):
    pass


class ZeroOperator(SuperoptError):
    pass


class Unstable(SuperoptError):
    pass


class NearSingularSymbol(SuperoptError):
    pass


class UnsupportedCompletion(SuperoptError):
    """Raised for thematic completions outside the supported class."""


class ReductionFailed(SuperoptError):
    pass


class NormNotBelowOne(SuperoptError):
    pass


class BracketFailed(SuperoptError):
    pass


class UnexpectedIndex(SuperoptError):
    pass


class NormTooLarge(SuperoptError):
    """No unitary interpolant exists: the Hankel norm exceeds one."""

    def __init__(self, norm, message=None):
        self.norm = float(norm)
        super().__init__(message or f"Hankel norm {self.norm:.12g} exceeds 1")


class WrongTailLength(SuperoptError):
    pass


class NotUnitary(SuperoptError):
    pass


class DiskZeroDenominator(SuperoptError):
    pass


class SymbolFileError(SuperoptError):
    """Malformed symbol file; the message carries the offending location."""
