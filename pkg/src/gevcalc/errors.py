"""Exception hierarchy shared by every module."""


class GevcalcError(ValueError):
    """Base class for all library errors."""


class InvalidMatrix(GevcalcError):
    pass


class NotSingleDiagonal(GevcalcError):
    pass


class InvalidAlphabet(GevcalcError):
    pass


class WrongGroup(GevcalcError):
    pass


class TrivialRepresentation(GevcalcError):
    """Raised when an operator needs l >= 1/2 but got the trivial representation."""


class InvalidLambda(GevcalcError):
    pass


class TruncationTooSmall(GevcalcError):
    pass


class EmptyWord(GevcalcError):
    pass


class NeedLengthTwo(GevcalcError):
    pass


class Unsupported(GevcalcError):
    pass


class SingularAtZero(GevcalcError):
    pass


class InvalidProfile(GevcalcError):
    pass


class DegenerateProfile(GevcalcError):
    pass
