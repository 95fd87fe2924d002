"""Exception hierarchy shared by all quadmix modules."""


class QuadmixError(Exception):
    pass


class MapValidationError(QuadmixError, ValueError):
    pass


class NotInvolution(MapValidationError):
    pass


class FixedPointInAlpha(MapValidationError):
    pass


class Disconnected(MapValidationError):
    pass


class NonPlanar(MapValidationError):
    pass


class NotPermutation(MapValidationError):
    pass


class NotQuadrangulation(MapValidationError):
    pass


class ParseError(QuadmixError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidSize(QuadmixError, ValueError):
    pass


class TooLarge(QuadmixError, ValueError):
    pass


class InvalidRadius(QuadmixError, ValueError):
    pass


class DomainError(QuadmixError, ValueError):
    pass


class RequiresLaziness(QuadmixError, ValueError):
    pass


class NotErgodic(QuadmixError, ValueError):
    pass


class NumericInstability(QuadmixError, ArithmeticError):
    pass
