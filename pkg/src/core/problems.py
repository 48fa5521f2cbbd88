"""Concatenated trap functions: standard, generalized and tailed.

Every trap variant is a function of per-block unitation only, so a problem
instance precomputes one exact table of ``k + 1`` values and evaluates a genome
by summing table lookups. Values are held as ``Fraction`` and, for the hot path,
as integers scaled by the common denominator; fitness comparisons inside the
algorithms therefore never suffer rounding.
"""

import math
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import Mapping

import numpy as np
from numpy.typing import NDArray

from ..utils.validation import (
  as_fraction,
  validate_nonnegative_int,
  validate_positive_int,
)
from .bitstring import BitString, Bits, block_unitations

_INT64_HEADROOM = 2**62


class ProblemError(ValueError):
  """Base exception for trap problem definitions."""

  pass


class GenomeLengthError(ProblemError):
  """Raised when a genome does not have length m*k."""

  pass


class Shape(StrEnum):
  STANDARD = "standard"
  GENERALIZED = "generalized"
  TAILED = "tailed"


@dataclass(frozen=True)
class TrapParams:
  """Parameters of one k-bit trap subfunction.

  ``a`` is the local optimum at unitation 0, ``b`` the global optimum at
  unitation ``k``, and ``z`` the unitation where both slopes meet.
  """

  k: int
  a: Fraction
  b: Fraction
  z: int

  def __post_init__(self) -> None:
    validate_positive_int("k", self.k)
    validate_nonnegative_int("z", self.z)
    object.__setattr__(self, "a", as_fraction("a", self.a))
    object.__setattr__(self, "b", as_fraction("b", self.b))
    if not 0 <= self.a < self.b:
      raise ProblemError(f"trap needs 0 <= a < b, got a={self.a}, b={self.b}")
    if self.z >= self.k:
      raise ProblemError(f"trap needs z < k, got z={self.z}, k={self.k}")
    # z == 0 only for the one-bit standard trap, which has no deceptive slope
    if (self.z == 0) != (self.a == 0):
      raise ProblemError(f"trap needs 1 <= z and a > 0, got z={self.z}, a={self.a}")

  @classmethod
  def standard(cls, k: int) -> "TrapParams":
    """The classic trap: a = k-1, b = k, z = k-1."""
    validate_positive_int("k", k)
    return cls(k=k, a=Fraction(k - 1), b=Fraction(k), z=k - 1)

  @property
  def is_standard(self) -> bool:
    return self == TrapParams.standard(self.k)


def _check_unitation(u: int, k: int) -> None:
  if not 0 <= u <= k:
    raise ProblemError(f"unitation {u} out of range [0, {k}]")


def trap_value(u: int, p: TrapParams, shape: Shape = Shape.GENERALIZED) -> Fraction:
  """Fitness of a single block with ``u`` ones.

  Standard and generalized traps climb from 0 at ``u = z`` to ``b`` at
  ``u = k``; the tailed trap instead climbs from ``a`` to ``b`` so that its
  local optimum can be high while the optimal region stays ``[z+1, k]``.

  Raises:
      ProblemError: If u is outside [0, k]
  """
  _check_unitation(u, p.k)
  if u <= p.z:
    return p.a * (p.z - u) / p.z if p.z else p.a
  if shape is Shape.TAILED:
    return p.a + (p.b - p.a) * (u - p.z) / (p.k - p.z)
  return p.b * (u - p.z) / (p.k - p.z)


def trap_table(p: TrapParams, shape: Shape) -> tuple[Fraction, ...]:
  """Block fitness for every unitation ``0..k``."""
  return tuple(trap_value(u, p, shape) for u in range(p.k + 1))


def region_start(p: TrapParams) -> int:
  """First unitation whose generalized trap value exceeds ``a``.

  Equals ``ceil(a(k-z)/b) + z`` whenever ``a(k-z)/b`` is not an integer; when
  it is, the boundary point has value exactly ``a`` and is excluded.
  """
  return math.floor(p.a * (p.k - p.z) / p.b) + p.z + 1


def shape_region_start(p: TrapParams, shape: Shape) -> int:
  if shape is Shape.TAILED:
    return p.z + 1
  return region_start(p)


def in_optimal_region(u: int, p: TrapParams, shape: Shape = Shape.GENERALIZED) -> bool:
  """Whether a block with ``u`` ones scores strictly above the local optimum."""
  _check_unitation(u, p.k)
  return u >= shape_region_start(p, shape)


def p_star(p: TrapParams, shape: Shape = Shape.GENERALIZED) -> Fraction:
  """Exact probability that a uniform random block lies in the optimal region."""
  start = shape_region_start(p, shape)
  hits = sum(math.comb(p.k, j) for j in range(start, p.k + 1))
  return Fraction(hits, 2**p.k)


class EvalCounter:
  """Counts full-genome evaluations for one run.

  The counter also remembers the evaluation at which a global optimum was
  first seen, and refuses to go past its budget.
  """

  def __init__(self, budget: int | None = None):
    if budget is not None:
      validate_nonnegative_int("budget", budget)
    self.budget = budget
    self.count = 0
    self.hitting_time: int | None = None

  @property
  def hit(self) -> bool:
    return self.hitting_time is not None

  @property
  def exhausted(self) -> bool:
    return self.budget is not None and self.count >= self.budget

  @property
  def done(self) -> bool:
    """True once the optimum was evaluated or no budget is left."""
    return self.hit or self.exhausted

  def record(self, optimal: bool) -> None:
    if self.exhausted:
      raise ProblemError(f"evaluation budget of {self.budget} exhausted")
    self.count += 1
    if optimal and self.hitting_time is None:
      self.hitting_time = self.count


@dataclass(frozen=True)
class ProblemInstance:
  """``m`` concatenated copies of one trap subfunction."""

  m: int
  params: TrapParams
  shape: Shape = Shape.STANDARD
  _table: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)
  _scale: int = field(init=False, repr=False, compare=False)
  _scaled: NDArray[np.int64] = field(init=False, repr=False, compare=False)

  def __post_init__(self) -> None:
    validate_positive_int("m", self.m)
    object.__setattr__(self, "shape", Shape(self.shape))
    if self.shape is Shape.STANDARD and not self.params.is_standard:
      raise ProblemError(
        f"standard shape requires a=k-1, b=k, z=k-1, got {self.params}"
      )
    table = trap_table(self.params, self.shape)
    scale = math.lcm(*(v.denominator for v in table))
    scaled = [int(v * scale) for v in table]
    dtype = np.int64 if max(scaled) * self.m < _INT64_HEADROOM else np.object_
    object.__setattr__(self, "_table", table)
    object.__setattr__(self, "_scale", scale)
    object.__setattr__(self, "_scaled", np.array(scaled, dtype=dtype))

  @classmethod
  def standard(cls, m: int, k: int) -> "ProblemInstance":
    return cls(m=m, params=TrapParams.standard(k), shape=Shape.STANDARD)

  @classmethod
  def generalized(
    cls, m: int, k: int, a: Fraction | int, b: Fraction | int, z: int
  ) -> "ProblemInstance":
    params = TrapParams(k, Fraction(a), Fraction(b), z)
    return cls(m=m, params=params, shape=Shape.GENERALIZED)

  @classmethod
  def tailed(
    cls, m: int, k: int, a: Fraction | int, b: Fraction | int, z: int
  ) -> "ProblemInstance":
    params = TrapParams(k, Fraction(a), Fraction(b), z)
    return cls(m=m, params=params, shape=Shape.TAILED)

  @classmethod
  def from_fields(cls, fields: Mapping[str, str]) -> "ProblemInstance":
    """Build an instance from ``shape, m, k, a, b, z`` text fields.

    The standard shape only needs ``m`` and ``k``.

    Raises:
        ProblemError: If a field is missing or malformed
    """
    try:
      shape = Shape(fields.get("shape", Shape.STANDARD))
      m = int(fields["m"])
      k = int(fields["k"])
      if shape is Shape.STANDARD:
        return cls.standard(m, k)
      params = TrapParams(
        k=k,
        a=as_fraction("a", fields["a"]),
        b=as_fraction("b", fields["b"]),
        z=int(fields["z"]),
      )
    except KeyError as e:
      raise ProblemError(f"problem description is missing field {e}")
    except ValueError as e:
      if isinstance(e, ProblemError):
        raise
      raise ProblemError(f"invalid problem description: {e}")
    return cls(m=m, params=params, shape=shape)

  def to_fields(self) -> dict[str, str]:
    """Plain-text ``key=value`` description, inverse of ``from_fields``."""
    p = self.params
    return {
      "shape": str(self.shape),
      "m": str(self.m),
      "k": str(p.k),
      "a": str(p.a),
      "b": str(p.b),
      "z": str(p.z),
    }

  @property
  def k(self) -> int:
    return self.params.k

  @property
  def length(self) -> int:
    return self.m * self.params.k

  @property
  def optimum_value(self) -> Fraction:
    return self.m * self.params.b

  @property
  def region_start(self) -> int:
    return shape_region_start(self.params, self.shape)

  @property
  def p_star(self) -> Fraction:
    return p_star(self.params, self.shape)

  @property
  def table(self) -> tuple[Fraction, ...]:
    return self._table

  def check_length(self, x: BitString) -> None:
    if len(x) != self.length:
      raise GenomeLengthError(
        f"genome length {len(x)} does not match m*k = {self.length}"
      )

  def score(self, bits: Bits, ctr: EvalCounter) -> int:
    """Fitness scaled to an integer; counts one evaluation.

    This is the evaluation used inside the search loops; ``bits`` must already
    have length ``m*k``.
    """
    us = bits.reshape(self.m, self.params.k).sum(axis=1)
    ctr.record(bool((us == self.params.k).all()))
    return int(self._scaled[us].sum())

  def fitness_of_score(self, score: int) -> Fraction:
    return Fraction(score, self._scale)


def concatenated_fitness(
  x: BitString, inst: ProblemInstance, ctr: EvalCounter
) -> Fraction:
  """Sum of the block trap values of ``x``; increments ``ctr`` by one.

  Raises:
      GenomeLengthError: If len(x) != m*k
  """
  inst.check_length(x)
  return inst.fitness_of_score(inst.score(x.bits, ctr))


def is_global_optimum(x: BitString, inst: ProblemInstance) -> bool:
  inst.check_length(x)
  return bool(x.bits.all())


def count_optimal_blocks(x: BitString, inst: ProblemInstance) -> int:
  """Number of blocks that are all ones."""
  inst.check_length(x)
  return int(np.count_nonzero(block_unitations(x, inst.k) == inst.k))


def region_membership(x: BitString, inst: ProblemInstance) -> NDArray[np.bool_]:
  """Per-block flags: is the block inside the optimal region."""
  inst.check_length(x)
  return block_unitations(x, inst.k) >= inst.region_start


def count_region_blocks(x: BitString, inst: ProblemInstance) -> int:
  """Number of blocks whose unitation lies in the optimal region."""
  return int(np.count_nonzero(region_membership(x, inst)))
