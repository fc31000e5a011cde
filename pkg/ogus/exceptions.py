"""
Module for all ogus exception classes
"""


class OgusError(Exception):
    """
    Base class of every error raised by this package.
    """
    def __init__(self, message=None):
        super().__init__(message)
        self.message = message


class MalformedInputError(OgusError):
    """
    Raised to indicate that input data cannot be interpreted as the requested object.
    """


class ShapeMismatchError(MalformedInputError):
    """
    Raised to indicate that matrix, vector or space dimensions do not agree.
    """
    def __init__(self, what, expected, actual):
        super().__init__("{}: expected shape {}, got {}".format(what, expected, actual))
        self.expected = expected
        self.actual = actual


class NotSquareError(MalformedInputError):
    """
    Raised to indicate that a square matrix was required.
    """
    def __init__(self, shape):
        super().__init__("Square matrix required, got shape {}".format(shape))
        self.shape = shape


class NotPrimeError(MalformedInputError, ValueError):
    """
    Raised to indicate that an integer used as a prime is not prime.
    """
    def __init__(self, value):
        super().__init__("{!r} is not a prime number".format(value))
        self.value = value


class NotInSubspaceError(OgusError):
    """
    Raised to indicate that a vector or subspace does not lie where it is required to.
    """


class UnknownPlaceError(OgusError, KeyError):
    """
    Raised to indicate that a place label is not present on an object.
    """
    def __init__(self, label):
        super().__init__("No Frobenius recorded at place {!r}".format(label))
        self.label = label

    def __str__(self):
        return self.message


class ExemptPlaceError(OgusError):
    """
    Raised to indicate that admissibility was requested at an exempt place.
    """
    def __init__(self, label):
        super().__init__("Place {!r} is exempt from admissibility".format(label))
        self.label = label


class NotStableError(OgusError):
    """
    Raised to indicate that a subspace is not stable under a Frobenius.
    """


class InvalidMorphismError(OgusError):
    """
    Raised to indicate that a morphism does not satisfy its compatibility conditions.
    """
    def __init__(self, message, clause=None):
        super().__init__(message)
        self.clause = clause


class UnsupportedShapeError(OgusError):
    """
    Raised to indicate that a computation is not available for a diagram shape.
    """


class SelectionError(OgusError):
    """
    Raised to indicate that a fibre-product selection names a missing vertex or slot.
    """


class LevelError(OgusError):
    """
    Raised to indicate that an object of level at most one was required.
    """


class InvalidObjectError(OgusError):
    """
    Raised to indicate that an object failed validation where validity is a precondition.
    """
    def __init__(self, message, validation=None):
        super().__init__(message)
        self.validation = validation


class NotCartesianError(InvalidObjectError):
    """
    Raised to indicate that a componentwise construction does not satisfy the cartesian-square condition.
    """


class ExtensionError(OgusError):
    """
    Raised to indicate that a materialized extension breaks an invertibility flag.
    """


class SplittingError(OgusError):
    """
    Raised to indicate that splitting data is not a section or not a lift.
    """


class UsageError(OgusError):
    """
    Raised to indicate an unknown subcommand or bad command-line arguments.
    """


class InputFileError(OgusError):
    """
    Raised to indicate that an input file could not be read.
    """
    def __init__(self, path, reason):
        super().__init__("Cannot read {}: {}".format(path, reason))
        self.path = path


class PluginMissingError(OgusError):
    """
    Raised to indicate that no plugin is registered under the requested identifier.
    """


class AmbiguousPluginError(OgusError):
    """
    Raised to indicate that an identifier names more than one plugin.
    """
    def __init__(self, all_entry_points):
        classes = (entry_point.load() for entry_point in all_entry_points)
        desc = ", ".join("{0.__module__}.{0.__name__}".format(cls) for cls in classes)
        super().__init__("Ambiguous entry points for {}: {}".format(all_entry_points[0].name, desc))
