"""Exception types raised across the package."""


class CollmemError(Exception):
    """Base class for all package errors."""


class NotFoundError(CollmemError, LookupError):
    pass


class WindowRangeError(CollmemError, ValueError):
    pass


class ShapeError(CollmemError, ValueError):
    pass


class FormatError(CollmemError, ValueError):
    pass


class EmptyInputError(CollmemError, ValueError):
    pass


class InsufficientDataError(CollmemError, ValueError):
    pass


class UndefinedModularityError(CollmemError, ValueError):
    pass


class UndefinedAccuracyError(CollmemError, ValueError):
    pass


class ConfigError(CollmemError, ValueError):
    pass
