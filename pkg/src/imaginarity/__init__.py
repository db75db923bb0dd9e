"""Imaginarity measures based on Tsallis, sandwiched Renyi and Tsallis
operator relative entropies, with verification tooling."""
from ._backend import available_backends, get_backend, set_backend
from .errors import (ImaginarityError, NumericalError, ParseError, UnsupportedDimensionError,
                     ValidationError)

__version__ = "0.1.0"

__all__ = [
    "ImaginarityError", "NumericalError", "ParseError", "UnsupportedDimensionError",
    "ValidationError", "available_backends", "get_backend", "set_backend",
]
