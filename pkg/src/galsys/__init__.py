"""Complete systems of finite Galois groups, codes and imaginaries."""
from .errors import GalsysError, InvariantError, ResourceCapError, SpecError, UsageError

__version__ = "0.1.0"

__all__ = [
    "GalsysError",
    "InvariantError",
    "ResourceCapError",
    "SpecError",
    "UsageError",
]
