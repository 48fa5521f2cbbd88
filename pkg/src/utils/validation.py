"""Validation utilities for gomea-trap-lab.

This module provides the argument checks shared by the problem definitions,
the search algorithms, the bound calculators and the command line. Every
helper raises ``ValueError`` with the parameter name and the offending value.
"""

from fractions import Fraction
from numbers import Real

MAX_SEED = 2**64 - 1


def validate_positive_int(name: str, value: int) -> int:
  """Validate that an integer parameter is at least 1.

  Args:
      name: Parameter name used in the error message
      value: Value to check

  Returns:
      The value unchanged

  Raises:
      ValueError: If value is not an integer or is smaller than 1
  """
  if isinstance(value, bool) or not isinstance(value, int):
    raise ValueError(f"{name} must be an integer, got {type(value).__name__}")
  if value < 1:
    raise ValueError(f"{name} must be a positive integer, got {value}")
  return value


def validate_nonnegative_int(name: str, value: int) -> int:
  """Validate that an integer parameter is at least 0."""
  if isinstance(value, bool) or not isinstance(value, int):
    raise ValueError(f"{name} must be an integer, got {type(value).__name__}")
  if value < 0:
    raise ValueError(f"{name} must be a nonnegative integer, got {value}")
  return value


def validate_probability(name: str, value: float | Fraction) -> float | Fraction:
  """Validate that a value lies in the closed unit interval.

  Args:
      name: Parameter name used in the error message
      value: Probability to check

  Returns:
      The value unchanged

  Raises:
      ValueError: If value is not a real number in [0, 1]
  """
  if isinstance(value, bool) or not isinstance(value, Real):
    raise ValueError(f"{name} must be a real number, got {type(value).__name__}")
  if not 0 <= value <= 1:
    raise ValueError(f"{name} must lie in [0, 1], got {value}")
  return value


def validate_positive_real(name: str, value: float | Fraction) -> float | Fraction:
  """Validate that a real parameter is strictly positive."""
  if isinstance(value, bool) or not isinstance(value, Real):
    raise ValueError(f"{name} must be a real number, got {type(value).__name__}")
  if not value > 0:
    raise ValueError(f"{name} must be positive, got {value}")
  return value


def validate_seed(seed: int) -> int:
  """Validate a 64-bit unsigned seed.

  Raises:
      ValueError: If the seed is not an integer in [0, 2^64)
  """
  if isinstance(seed, bool) or not isinstance(seed, int):
    raise ValueError(f"seed must be an integer, got {type(seed).__name__}")
  if not 0 <= seed <= MAX_SEED:
    raise ValueError(f"seed must lie in [0, 2^64), got {seed}")
  return seed


def as_fraction(name: str, value: int | float | str | Fraction) -> Fraction:
  """Convert a user supplied number to an exact fraction.

  Floats go through their shortest repr so that ``0.1`` becomes ``1/10``
  rather than the binary expansion of the float.

  Raises:
      ValueError: If the value cannot be read as a finite number
  """
  if isinstance(value, bool):
    raise ValueError(f"{name} must be a number, got bool")
  try:
    if isinstance(value, Fraction):
      return value
    if isinstance(value, int):
      return Fraction(value)
    if isinstance(value, float):
      return Fraction(repr(value))
    return Fraction(value.strip())
  except (ValueError, ZeroDivisionError, OverflowError) as e:
    raise ValueError(f"{name} is not a finite number: {value!r} ({e})")
