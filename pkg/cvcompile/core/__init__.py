from .config import settings
from .exceptions import (
    ConfigurationError,
    CVCompileError,
    DegenerateInputError,
    InvalidArgumentError,
    OutOfRangeError,
    PreconditionError,
    ResourceRefusalError,
    UnsupportedSizeError,
)

__all__ = [
    "settings",
    "CVCompileError",
    "ConfigurationError",
    "DegenerateInputError",
    "InvalidArgumentError",
    "OutOfRangeError",
    "PreconditionError",
    "ResourceRefusalError",
    "UnsupportedSizeError",
]
