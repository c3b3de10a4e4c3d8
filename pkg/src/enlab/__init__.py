"""Exact E_n-homology of functors on planar level trees."""
from .exactla import BACKEND, QQ, Field, parse_field

__version__ = "0.1.0"

__all__ = ["BACKEND", "QQ", "Field", "parse_field", "__version__"]
