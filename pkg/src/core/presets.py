"""Sweep presets: the published experiment grids as data tables.

Each preset is a list of grid points. A grid point names the problem, the
algorithm, the population constant and the budget preset; replications and the
base seed are supplied when the sweep is run.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from tqdm import tqdm

from ..utils.validation import MAX_SEED, validate_positive_int, validate_seed
from .harness import (
  Algorithm,
  BudgetPreset,
  ExperimentResult,
  ExperimentSpec,
  Init,
  run_experiment,
)
from .problems import ProblemInstance, Shape, TrapParams

logger = logging.getLogger(__name__)


class UnknownPresetError(ValueError):
  """Raised when a sweep preset name is not registered."""

  pass


@dataclass(frozen=True)
class GridPoint:
  """One row of a sweep: problem, algorithm, c, initializer and budget preset."""

  shape: Shape
  m: int
  k: int
  algorithm: Algorithm
  c: Fraction
  init: Init
  budget_preset: BudgetPreset
  a: Fraction | None = None
  b: Fraction | None = None
  z: int | None = None

  def instance(self) -> ProblemInstance:
    if self.shape is Shape.STANDARD:
      return ProblemInstance.standard(self.m, self.k)
    assert self.a is not None and self.b is not None and self.z is not None
    params = TrapParams(self.k, self.a, self.b, self.z)
    return ProblemInstance(m=self.m, params=params, shape=self.shape)

  def spec(self, replications: int, base_seed: int) -> ExperimentSpec:
    return ExperimentSpec.build(
      self.instance(),
      self.algorithm,
      c=None if self.algorithm is Algorithm.EA else self.c,
      init=self.init,
      budget_preset=self.budget_preset,
      replications=replications,
      base_seed=base_seed,
    )


@dataclass(frozen=True)
class SweepPreset:
  name: str
  description: str
  points: tuple[GridPoint, ...]
  replications: int


_HALVES = tuple(Fraction(i, 2) for i in range(1, 9))

# k -> m values for the worst-case GOMEA runs; m stops where mu*m^3 gets large.
_WORST_CASE_M = {
  4: range(2, 17, 2),
  5: range(2, 13, 2),
  6: range(2, 11, 2),
  7: range(2, 9, 2),
}


def _worst_case_standard() -> tuple[GridPoint, ...]:
  points = [
    GridPoint(
      Shape.STANDARD, m, k, alg, Fraction(1), Init.WORST_STANDARD, BudgetPreset.THM2
    )
    for k, ms in _WORST_CASE_M.items()
    for m in ms
    for alg in (Algorithm.GOMEA, Algorithm.GOMEA_MUT)
  ]
  points += [
    GridPoint(
      Shape.STANDARD, m, 4, Algorithm.EA, Fraction(1), Init.UNIFORM, BudgetPreset.THM1
    )
    for m in (2, 3, 4)
  ]
  return tuple(points)


def _success_rate_standard() -> tuple[GridPoint, ...]:
  return tuple(
    GridPoint(Shape.STANDARD, 6, 4, alg, c, Init.UNIFORM, BudgetPreset.S42)
    for c in _HALVES
    for alg in (Algorithm.GOMEA, Algorithm.GOMEA_MUT, Algorithm.GA)
  )


def _worst_case_generalized() -> tuple[GridPoint, ...]:
  points: list[GridPoint] = []
  for k in (4, 5, 6, 7):
    for z in sorted({max(1, k - 3), k - 2}):
      points += [
        GridPoint(
          Shape.GENERALIZED,
          m,
          k,
          Algorithm.GOMEA_MUT,
          Fraction(1),
          Init.WORST_GENERALIZED,
          BudgetPreset.THM3,
          a=Fraction(1),
          b=Fraction(k),
          z=z,
        )
        for m in (2, 4, 6, 8, 10)
      ]
  return tuple(points)


def _generalized_vs_tailed() -> tuple[GridPoint, ...]:
  shapes = ((Shape.GENERALIZED, Fraction(1)), (Shape.TAILED, Fraction(5)))
  return tuple(
    GridPoint(
      shape,
      8,
      6,
      alg,
      c,
      Init.UNIFORM,
      BudgetPreset.S632,
      a=a,
      b=Fraction(6),
      z=4,
    )
    for shape, a in shapes
    for c in _HALVES[:6]
    for alg in (Algorithm.GOMEA, Algorithm.GOMEA_MUT, Algorithm.GA)
  )


PRESETS: dict[str, SweepPreset] = {
  "fig3": SweepPreset(
    "fig3",
    "standard trap, worst-case population, GOMEA with and without local "
    "mutation vs the c m^3 2^k bound; (1+1) EA at k=4 for reference",
    _worst_case_standard(),
    100,
  ),
  "fig4": SweepPreset(
    "fig4",
    "standard trap m=6 k=4, success rate vs c for GOMEA, GOMEA with mutation "
    "and the (mu+1) GA with deterministic crowding",
    _success_rate_standard(),
    1000,
  ),
  "fig6": SweepPreset(
    "fig6",
    "generalized trap a=1 b=k, worst-case population, GOMEA with mutation vs "
    "the full and dominant optimal-region bounds",
    _worst_case_generalized(),
    100,
  ),
  "fig7": SweepPreset(
    "fig7",
    "generalized vs tailed trap m=8 k=6 z=4, success rate vs c for GOMEA, "
    "GOMEA with mutation and the GA",
    _generalized_vs_tailed(),
    1000,
  ),
}


def get_preset(name: str) -> SweepPreset:
  try:
    return PRESETS[name]
  except KeyError:
    raise UnknownPresetError(
      f"unknown preset '{name}', expected one of {', '.join(PRESETS)}"
    )


def point_seed(base_seed: int, index: int) -> int:
  """Seed for grid point ``index``; replication labels stay below bit 32."""
  return (base_seed ^ (index << 32)) & MAX_SEED


def sweep_specs(
  preset: SweepPreset,
  replications: int | None = None,
  base_seed: int = 0,
  ks: Iterable[int] | None = None,
  ms: Iterable[int] | None = None,
  algorithms: Iterable[Algorithm] | None = None,
) -> list[ExperimentSpec]:
  """Experiment specs for the points of ``preset``, optionally filtered.

  Point seeds derive from the index in the full table, so filtering does not
  change the seed of the points that remain.

  Args:
      preset: Sweep preset
      replications: Runs per point; defaults to the preset's own count
      base_seed: Seed of the whole sweep
      ks: Keep only points with these k
      ms: Keep only points with these m
      algorithms: Keep only points with these algorithms

  Returns:
      One spec per kept point, in table order
  """
  reps = preset.replications if replications is None else replications
  validate_positive_int("replications", reps)
  validate_seed(base_seed)
  keep_k = set(ks) if ks is not None else None
  keep_m = set(ms) if ms is not None else None
  keep_alg = set(algorithms) if algorithms is not None else None
  specs: list[ExperimentSpec] = []
  for index, point in enumerate(preset.points):
    if keep_k is not None and point.k not in keep_k:
      continue
    if keep_m is not None and point.m not in keep_m:
      continue
    if keep_alg is not None and point.algorithm not in keep_alg:
      continue
    specs.append(point.spec(reps, point_seed(base_seed, index)))
  logger.info(f"preset {preset.name}: {len(specs)} of {len(preset.points)} points")
  return specs


def run_sweep(
  specs: list[ExperimentSpec], workers: int = 1, progress: bool = True
) -> list[ExperimentResult]:
  """Run each spec in turn; the progress bar goes to stderr."""
  results: list[ExperimentResult] = []
  for spec in tqdm(specs, desc="sweep", unit="point", disable=not progress):
    results.append(run_experiment(spec, workers))
  return results
