"""Exception types raised across the package."""


class FidelityQNNError(Exception):
    """Base class for all package errors."""


class CapacityError(FidelityQNNError):
    """Requested register is larger than the dense simulator supports."""


class ParameterError(FidelityQNNError, ValueError):
    pass


class QubitIndexError(FidelityQNNError, IndexError):
    pass


class ShapeError(FidelityQNNError, ValueError):
    pass


class LayoutError(FidelityQNNError, ValueError):
    """Qubit ranges of a composed circuit overlap or fall outside the register."""


class DomainError(FidelityQNNError, ValueError):
    pass


class DataFormatError(FidelityQNNError, ValueError):
    """Input file could not be parsed."""


class DimensionError(DataFormatError):
    pass


class ConfigurationError(FidelityQNNError, ValueError):
    pass


class CheckpointError(FidelityQNNError):
    pass
