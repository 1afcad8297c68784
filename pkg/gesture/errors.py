# Exception hierarchy shared by the library and the CLI


class GestureError(Exception):
    """Base class for every failure raised by the gesture package."""


class ConfigError(GestureError, ValueError):
    pass


class PnmError(GestureError, ValueError):
    """A PNM file could not be decoded."""


class PnmHeaderError(PnmError):
    pass


class PnmMaxvalError(PnmError):
    pass


class PnmTruncatedError(PnmError):
    pass


class InvalidImageError(GestureError, ValueError):
    """A pixel buffer violates its type invariants."""


class DimensionMismatchError(GestureError, ValueError):
    pass


class EmptyRegionError(GestureError, ValueError):
    """The segmentation mask has no foreground pixel."""


class ModelFormatError(GestureError, ValueError):
    pass


class ModelVersionError(ModelFormatError):
    pass


class DatasetError(GestureError, ValueError):
    pass
