"""Exception types shared across the package."""


class TensorAmpError(Exception):
    """Base class for all package errors."""


class InvalidShapeError(TensorAmpError):
    """Raised for empty dimension lists or non-positive mode sizes."""


class InvalidParameterError(TensorAmpError):
    """Raised for out-of-range scalar parameters (noise variance, rank, ...)."""


class ShapeMismatchError(TensorAmpError):
    """Raised when tensors / factor sets with incompatible shapes are combined."""


class NumericDomainError(TensorAmpError):
    """Raised when a channel or posterior evaluation leaves its numeric domain."""


class UnsupportedPriorError(TensorAmpError):
    """Raised when an operation does not support the requested prior / rank."""


class DivergedError(TensorAmpError):
    """Raised when an iterative solver produces non-finite values."""


class TooLargeError(TensorAmpError):
    """Raised when an input exceeds a hard size guard."""


class BracketError(TensorAmpError):
    """Raised when a bisection bracket does not straddle a boundary."""


class IndeterminateError(TensorAmpError):
    """Raised when a classification cannot be made (inner solver stalled)."""


class SingularSystemError(TensorAmpError):
    """Raised when a least-squares system is singular and no ridge is set."""


class ConfigError(TensorAmpError):
    """Raised for malformed configuration files or inconsistent settings."""
