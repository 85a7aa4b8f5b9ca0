class CubistError(Exception):
    """Base class for every domain error raised by cubist"""


class UnknownWallError(CubistError):
    pass


class InvalidSystemError(CubistError):
    pass


class RepeatedWallError(CubistError):
    pass


class WallLimitError(CubistError):
    pass


class DegreeLimitError(CubistError):
    pass


class InvalidWalledSpaceError(CubistError):
    pass


class InconsistentOrientationError(CubistError):
    pass


class NotCubeComplexError(CubistError):
    pass


class LengthMismatchError(CubistError):
    pass


class EmptyInputError(CubistError):
    pass


class VertexNotFoundError(CubistError):
    pass


class InconsistentSetError(CubistError):
    pass


class NotInvariantError(CubistError):
    pass


class InvalidMeasureError(CubistError):
    pass


class InvalidAutomorphismError(CubistError):
    pass


class FormatError(CubistError):
    pass


class InvariantViolation(CubistError):
    """A property that must always hold did not; either a bug or a counterexample"""
