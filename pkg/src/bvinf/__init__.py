"""Exact computer algebra for commutative BV-infinity algebras."""

from ._kernels import BACKEND
from .graded import (Algebra, Generator, GradedError, Ring, Series, Truncation,
                     hbar_conjugate, koszul_sign, multiply, parse_element,
                     series_exp, series_log)

__version__ = "0.1.0"

__all__ = [
    "Algebra", "BACKEND", "Generator", "GradedError", "Ring", "Series", "Truncation",
    "hbar_conjugate", "koszul_sign", "multiply", "parse_element", "series_exp",
    "series_log",
]
