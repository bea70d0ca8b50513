"""Smooth-number sets, S-unit equations and windowed set decompositions."""

from friable.errors import ArgumentError, CapacityError, FriableError, RangeError
from friable.smooth_core import (
    FactorTable,
    SmoothnessThreshold,
    SortedIntSet,
    build_factor_table,
    counting,
    friable_window,
    greatest_prime_factor,
    is_smooth,
    prime_count,
    shifted_friable_window,
)

__all__ = [
    "ArgumentError",
    "CapacityError",
    "FriableError",
    "RangeError",
    "FactorTable",
    "SmoothnessThreshold",
    "SortedIntSet",
    "build_factor_table",
    "counting",
    "friable_window",
    "greatest_prime_factor",
    "is_smooth",
    "prime_count",
    "shifted_friable_window",
]

__version__ = "0.1.0"
