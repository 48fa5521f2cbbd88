"""Experiment harness: initial populations, budgets and replicated runs.

An ``ExperimentSpec`` fully determines a batch of runs. Replication ``rep``
uses the stream seeded with ``base_seed ^ rep``, and results are joined in
replication order, so the output does not depend on the number of workers.
"""

import logging
import math
from collections.abc import Iterator, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction

import numpy as np

from ..utils.validation import (
  as_fraction,
  validate_positive_int,
  validate_probability,
  validate_seed,
)
from .algorithms import (
  Population,
  RunOutcome,
  gomea_run,
  mu_plus_one_dc_ga_run,
  one_plus_one_ea_run,
)
from .bitstring import RNG_ID, BitString, RandomStream
from .bounds import (
  ea_upper_bound,
  gomea_bound,
  lemma1_population,
  lemma2_population,
  thm3_bound,
)
from .fos import FOS, is_truthful, truthful_mp_fos
from .problems import ProblemInstance, Shape

logger = logging.getLogger(__name__)


class ExperimentError(ValueError):
  """Base exception for invalid experiment settings."""

  pass


class InvalidPairingError(ExperimentError):
  """Raised when algorithm, initializer and problem shape do not fit together."""

  pass


class Algorithm(StrEnum):
  GOMEA = "gomea"
  GOMEA_MUT = "gomea-mut"
  EA = "ea"
  GA = "ga"

  @classmethod
  def parse(cls, text: str) -> "Algorithm":
    key = text.strip().lower()
    try:
      return _ALGORITHM_ALIASES[key]
    except KeyError:
      raise ExperimentError(
        f"unknown algorithm '{text}', expected one of {', '.join(a for a in cls)}"
      )

  @property
  def uses_population(self) -> bool:
    return self is not Algorithm.EA


_ALGORITHM_ALIASES = {
  "gomea": Algorithm.GOMEA,
  "gomea-mut": Algorithm.GOMEA_MUT,
  "gomea+mutation": Algorithm.GOMEA_MUT,
  "ea": Algorithm.EA,
  "one_plus_one_ea": Algorithm.EA,
  "ga": Algorithm.GA,
  "mu_plus_one_dc_ga": Algorithm.GA,
}


class Init(StrEnum):
  UNIFORM = "uniform"
  WORST_STANDARD = "worst-standard"
  WORST_GENERALIZED = "worst-generalized"

  @classmethod
  def parse(cls, text: str) -> "Init":
    key = text.strip().lower().replace("_", "-")
    aliases = {
      "worst-case-standard": cls.WORST_STANDARD,
      "worst-case-generalized": cls.WORST_GENERALIZED,
    }
    if key in aliases:
      return aliases[key]
    try:
      return cls(key)
    except ValueError:
      raise ExperimentError(
        f"unknown initializer '{text}', expected one of {', '.join(i for i in cls)}"
      )


class BudgetPreset(StrEnum):
  THM1 = "thm1"
  THM2 = "thm2"
  THM3 = "thm3"
  S42 = "s42"
  S632 = "s632"


# Population initializers. None of them evaluates fitness.


def uniform_population(mu: int, length: int, r: RandomStream) -> Population:
  """``mu`` genomes with independent fair-coin bits."""
  validate_positive_int("mu", mu)
  validate_positive_int("length", length)
  rows = r.bits(mu * length).reshape(mu, length)
  return Population([BitString._wrap(row.copy()) for row in rows])


def worst_case_standard(mu: int, inst: ProblemInstance, r: RandomStream) -> Population:
  """All-zero genomes; per block one random individual gets that block all ones.

  Recipients are drawn independently per block, so one individual may receive
  several blocks.
  """
  validate_positive_int("mu", mu)
  if inst.shape is not Shape.STANDARD:
    raise InvalidPairingError(
      f"worst-standard initialization needs the standard shape, got {inst.shape}"
    )
  rows = np.zeros((mu, inst.length), dtype=np.uint8)
  k = inst.k
  for i in range(inst.m):
    rows[r.draw_index(mu), i * k : i * k + k] = 1
  return Population([BitString._wrap(row) for row in rows])


def worst_case_generalized(
  mu: int, inst: ProblemInstance, r: RandomStream
) -> Population:
  """All-zero genomes; per block one random individual gets ``z+1`` ones there.

  The ``z+1`` positions are drawn uniformly inside the block.
  """
  validate_positive_int("mu", mu)
  if inst.shape is Shape.STANDARD:
    raise InvalidPairingError(
      "worst-generalized initialization needs the generalized or tailed shape"
    )
  rows = np.zeros((mu, inst.length), dtype=np.uint8)
  k, ones = inst.k, inst.params.z + 1
  for i in range(inst.m):
    who = r.draw_index(mu)
    rows[who, i * k + r.sample(k, ones)] = 1
  return Population([BitString._wrap(row) for row in rows])


def inject_optimum(pop: Population) -> Population:
  """Copy of ``pop`` whose first member is the all-ones genome."""
  genomes = list(pop.genomes)
  genomes[0] = BitString.ones(pop.genome_length)
  return Population(genomes)


# Budgets and population sizing.


def population_size(inst: ProblemInstance, c: Fraction) -> int:
  """``c m 2^k`` for the standard trap, ``(c/p*) m`` otherwise."""
  if inst.shape is Shape.STANDARD:
    return lemma1_population(inst.m, inst.k, c)
  return lemma2_population(inst.m, inst.p_star, c)


def population_constant(inst: ProblemInstance, mu: int) -> Fraction:
  """The ``c`` that a given ``mu`` corresponds to; inverse of ``population_size``."""
  if inst.shape is Shape.STANDARD:
    return Fraction(mu, inst.m * 2**inst.k)
  return Fraction(mu) * inst.p_star / inst.m


def success_budget(
  inst: ProblemInstance, c: Fraction | float, algorithm: Algorithm
) -> int:
  """Evaluation limit for a run to count as a success.

  ``2 c m^3 k^2`` on the standard trap (ten times that for the GA) and
  ``2 (c/p*) m^3`` on generalized and tailed traps (twenty times for the GA).
  """
  preset = BudgetPreset.S42 if inst.shape is Shape.STANDARD else BudgetPreset.S632
  return budget_for_preset(preset, inst, c, algorithm)


def budget_for_preset(
  preset: BudgetPreset, inst: ProblemInstance, c: Fraction | float, algorithm: Algorithm
) -> int:
  """Budget in evaluations for a named preset.

  Raises:
      ExperimentError: If the preset needs parameters the instance lacks
  """
  c = as_fraction("c", c)
  m, k = inst.m, inst.k
  match preset:
    case BudgetPreset.S42:
      factor = 10 if algorithm is Algorithm.GA else 1
      return math.floor(factor * 2 * c * m**3 * k**2)
    case BudgetPreset.S632:
      factor = 20 if algorithm is Algorithm.GA else 1
      return math.floor(factor * 2 * c / inst.p_star * m**3)
    case BudgetPreset.THM1:
      return math.ceil(10 * ea_upper_bound(m, k))
    case BudgetPreset.THM2:
      return math.ceil(10 * gomea_bound(m, k, c))
    case BudgetPreset.THM3:
      if m < 2:
        raise ExperimentError("the thm3 budget needs m >= 2")
      full, _ = thm3_bound(m, inst.params, c, inst.shape)
      return math.ceil(10 * full)


def default_budget_preset(inst: ProblemInstance, algorithm: Algorithm) -> BudgetPreset:
  """Preset used when neither a budget nor a preset is given.

  Raises:
      ExperimentError: On the standard trap with k != 4, where the success
          budget ``2cm^3k^2`` and the theorem budget differ and must be chosen
  """
  if algorithm is Algorithm.EA:
    return BudgetPreset.THM1
  if inst.shape is not Shape.STANDARD:
    return BudgetPreset.S632
  if inst.k == 4:
    return BudgetPreset.S42
  raise ExperimentError(
    "standard trap with k != 4: choose --budget-preset s42 or thm2, or --budget"
  )


@dataclass(frozen=True)
class ExperimentSpec:
  """Everything that determines a batch of replicated runs."""

  instance: ProblemInstance
  algorithm: Algorithm
  mu: int
  c: Fraction
  init: Init
  budget: int
  replications: int
  base_seed: int
  budget_preset: BudgetPreset | None = None
  fos: FOS | None = None
  ea_rate: float | None = None
  ga_mutation_rate: float = 0.0
  seeded_optimum: bool = False

  def __post_init__(self) -> None:
    validate_positive_int("replications", self.replications)
    validate_positive_int("budget", self.budget)
    validate_seed(self.base_seed)
    validate_probability("ga_mutation_rate", self.ga_mutation_rate)
    if self.algorithm.uses_population:
      if self.mu < 2:
        raise ExperimentError(f"population size must be at least 2, got {self.mu}")
      if self.budget < self.mu:
        raise ExperimentError(
          f"budget {self.budget} is smaller than the initial population {self.mu}"
        )
    elif self.init is not Init.UNIFORM:
      raise InvalidPairingError("the (1+1) EA always starts from a uniform genome")
    elif self.seeded_optimum:
      raise InvalidPairingError("the (1+1) EA has no population to seed")
    if self.init is Init.WORST_STANDARD and self.instance.shape is not Shape.STANDARD:
      raise InvalidPairingError(
        f"worst-standard initialization needs the standard shape, got "
        f"{self.instance.shape}"
      )
    if self.init is Init.WORST_GENERALIZED and self.instance.shape is Shape.STANDARD:
      raise InvalidPairingError(
        "worst-generalized initialization needs the generalized or tailed shape"
      )
    if self.ea_rate is not None and not 0 < self.ea_rate < 1:
      raise ExperimentError(f"ea rate must lie in (0, 1), got {self.ea_rate}")
    if self.fos is not None and self.fos.genome_length != self.instance.length:
      raise ExperimentError(
        f"FOS covers {self.fos.genome_length} positions, genome has "
        f"{self.instance.length}"
      )

  @classmethod
  def build(
    cls,
    instance: ProblemInstance,
    algorithm: Algorithm,
    *,
    mu: int | None = None,
    c: Fraction | float | str | None = None,
    init: Init = Init.UNIFORM,
    budget: int | None = None,
    budget_preset: BudgetPreset | None = None,
    replications: int = 1,
    base_seed: int = 0,
    fos: FOS | None = None,
    ea_rate: float | None = None,
    ga_mutation_rate: float = 0.0,
    seeded_optimum: bool = False,
  ) -> "ExperimentSpec":
    """Derive population size and budget, then validate.

    ``mu`` and ``c`` are mutually exclusive; with neither, ``c = 1``. A
    ``budget`` wins over ``budget_preset``; with neither the default preset
    for the instance and algorithm applies.

    Raises:
        ExperimentError: On inconsistent or incomplete settings
    """
    if mu is not None and c is not None:
      raise ExperimentError("give either mu or c, not both")
    if algorithm is Algorithm.EA:
      mu_eff, c_eff = 1, as_fraction("c", c if c is not None else 1)
    elif mu is not None:
      mu_eff, c_eff = mu, population_constant(instance, mu)
    else:
      c_eff = as_fraction("c", c if c is not None else 1)
      if c_eff <= 0:
        raise ExperimentError(f"c must be positive, got {c_eff}")
      mu_eff = population_size(instance, c_eff)
    if budget is None:
      preset = budget_preset or default_budget_preset(instance, algorithm)
      budget = budget_for_preset(preset, instance, c_eff, algorithm)
      logger.debug(f"budget {budget} from preset {preset}")
    else:
      preset = None
    return cls(
      instance=instance,
      algorithm=algorithm,
      mu=mu_eff,
      c=c_eff,
      init=init,
      budget=budget,
      replications=replications,
      base_seed=base_seed,
      budget_preset=preset,
      fos=fos,
      ea_rate=ea_rate,
      ga_mutation_rate=ga_mutation_rate,
      seeded_optimum=seeded_optimum,
    )

  @property
  def linkage(self) -> FOS:
    return self.fos or truthful_mp_fos(self.instance.m, self.instance.k)

  @property
  def rate(self) -> float:
    """Mutation rate of the (1+1) EA, ``1/(mk)`` unless overridden."""
    return self.ea_rate if self.ea_rate is not None else 1.0 / self.instance.length

  def echo(self) -> dict[str, str]:
    """Header fields that reproduce this spec via ``from_echo``."""
    fields = self.instance.to_fields()
    fields.update(
      {
        "algorithm": str(self.algorithm),
        "mu": str(self.mu),
        "c": str(self.c),
        "init": str(self.init),
        "budget": str(self.budget),
        "budget_preset": str(self.budget_preset or ""),
        "replications": str(self.replications),
        "base_seed": str(self.base_seed),
        "fos": "truthful" if self.fos is None else _fos_echo(self.fos),
        "ea_rate": repr(self.rate) if self.algorithm is Algorithm.EA else "",
        "ga_mutation_rate": repr(self.ga_mutation_rate),
        "seeded_optimum": str(self.seeded_optimum).lower(),
        "rng_id": RNG_ID,
      }
    )
    return fields

  @classmethod
  def from_echo(cls, fields: Mapping[str, str]) -> "ExperimentSpec":
    """Rebuild a spec from the header fields written by ``echo``.

    Raises:
        ExperimentError: If a field is missing or malformed
    """
    try:
      instance = ProblemInstance.from_fields(fields)
      fos_text = fields.get("fos", "truthful")
      return cls(
        instance=instance,
        algorithm=Algorithm.parse(fields["algorithm"]),
        mu=int(fields["mu"]),
        c=as_fraction("c", fields["c"]),
        init=Init.parse(fields["init"]),
        budget=int(fields["budget"]),
        replications=int(fields["replications"]),
        base_seed=int(fields["base_seed"]),
        budget_preset=BudgetPreset(fields["budget_preset"])
        if fields.get("budget_preset")
        else None,
        fos=None if fos_text == "truthful" else _fos_from_echo(fos_text, instance),
        ea_rate=float(fields["ea_rate"]) if fields.get("ea_rate") else None,
        ga_mutation_rate=float(fields.get("ga_mutation_rate", "0.0")),
        seeded_optimum=fields.get("seeded_optimum", "false") == "true",
      )
    except KeyError as e:
      raise ExperimentError(f"experiment header is missing field {e}")


def _fos_echo(f: FOS) -> str:
  return "|".join(",".join(str(j) for j in sorted(s)) for s in f.subsets)


def _fos_from_echo(text: str, inst: ProblemInstance) -> FOS:
  parts = ([int(j) for j in part.split(",")] for part in text.split("|"))
  return FOS.of(parts, inst.length)


@dataclass(frozen=True)
class RunRecord:
  """Outcome of replication ``rep`` run with stream seed ``seed``."""

  rep: int
  seed: int
  hit: bool
  hitting_time: int | None
  evaluations_used: int


@dataclass(frozen=True)
class SummaryRow:
  """Aggregate over the replications of one spec.

  Hitting-time statistics cover successful runs only; ``censored`` counts the
  runs that used up their budget.
  """

  spec: ExperimentSpec
  successes: int
  censored: int
  success_rate: float
  mean_hitting_time: float | None
  std_hitting_time: float | None
  total_evaluations: int
  bound_value: float | None
  bound_dominant: float | None = None


@dataclass(frozen=True)
class ExperimentResult:
  summary: SummaryRow
  records: tuple[RunRecord, ...] = field(repr=False)


def initial_population(spec: ExperimentSpec, r: RandomStream) -> Population:
  inst = spec.instance
  match spec.init:
    case Init.UNIFORM:
      pop = uniform_population(spec.mu, inst.length, r)
    case Init.WORST_STANDARD:
      pop = worst_case_standard(spec.mu, inst, r)
    case Init.WORST_GENERALIZED:
      pop = worst_case_generalized(spec.mu, inst, r)
  return inject_optimum(pop) if spec.seeded_optimum else pop


def run_single(spec: ExperimentSpec, rep: int) -> RunRecord:
  """Run replication ``rep`` of ``spec`` on its own derived stream."""
  r = RandomStream(spec.base_seed).child(rep)
  inst = spec.instance
  outcome: RunOutcome
  match spec.algorithm:
    case Algorithm.EA:
      outcome = one_plus_one_ea_run(inst, spec.rate, spec.budget, r)
    case Algorithm.GA:
      init = initial_population(spec, r)
      outcome = mu_plus_one_dc_ga_run(
        inst, spec.mu, spec.budget, init, r, spec.ga_mutation_rate
      )
    case Algorithm.GOMEA | Algorithm.GOMEA_MUT:
      init = initial_population(spec, r)
      outcome = gomea_run(
        inst,
        spec.linkage,
        spec.mu,
        spec.budget,
        init,
        r,
        mutate=spec.algorithm is Algorithm.GOMEA_MUT,
      )
  return RunRecord(
    rep=rep,
    seed=r.seed,
    hit=outcome.hit,
    hitting_time=outcome.hitting_time,
    evaluations_used=outcome.evaluations_used,
  )


def bound_for(spec: ExperimentSpec) -> tuple[float | None, float | None]:
  """Theory value attached to a summary: (bound, dominant term or None)."""
  inst = spec.instance
  if spec.algorithm is Algorithm.EA:
    return ea_upper_bound(inst.m, inst.k), None
  if inst.shape is Shape.STANDARD:
    return gomea_bound(inst.m, inst.k, spec.c), None
  if inst.m < 2:
    return None, None
  return thm3_bound(inst.m, inst.params, spec.c, inst.shape)


def summarize(spec: ExperimentSpec, records: tuple[RunRecord, ...]) -> SummaryRow:
  """Aggregate run records; the result does not depend on their order."""
  times = np.sort(
    np.array([rec.hitting_time for rec in records if rec.hit], dtype=np.int64)
  )
  successes = int(times.size)
  mean = float(times.mean()) if successes else None
  std = float(times.std(ddof=1)) if successes > 1 else (0.0 if successes else None)
  bound, dominant = bound_for(spec)
  return SummaryRow(
    spec=spec,
    successes=successes,
    censored=len(records) - successes,
    success_rate=successes / len(records),
    mean_hitting_time=mean,
    std_hitting_time=std,
    total_evaluations=sum(rec.evaluations_used for rec in records),
    bound_value=bound,
    bound_dominant=dominant,
  )


def _replicate(spec: ExperimentSpec, workers: int) -> Iterator[RunRecord]:
  reps = range(spec.replications)
  if workers <= 1 or spec.replications == 1:
    return (run_single(spec, rep) for rep in reps)
  chunk = max(1, spec.replications // (workers * 4))
  with ProcessPoolExecutor(max_workers=workers) as executor:
    # map yields in submission order, whatever order the workers finish in
    records = executor.map(run_single, [spec] * len(reps), reps, chunksize=chunk)
    return iter(list(records))


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
  """Execute every replication of ``spec`` and aggregate them.

  Args:
      spec: Validated experiment settings
      workers: Worker processes; 1 runs inline

  Returns:
      Summary plus per-run records in replication order
  """
  validate_positive_int("workers", workers)
  if spec.fos is not None and not is_truthful(spec.fos, spec.instance):
    logger.info("running with an untruthful FOS")
  logger.info(
    f"experiment {spec.algorithm} on {spec.instance.shape} m={spec.instance.m} "
    f"k={spec.instance.k}: mu={spec.mu} budget={spec.budget} "
    f"reps={spec.replications} seed={spec.base_seed}"
  )
  records = tuple(_replicate(spec, workers))
  for rec in records:
    logger.debug(f"rep {rec.rep}: hit={rec.hit} time={rec.hitting_time}")
  summary = summarize(spec, records)
  logger.info(
    f"success rate {summary.success_rate:.3f} "
    f"({summary.successes}/{spec.replications}), mean hitting time "
    f"{summary.mean_hitting_time}"
  )
  return ExperimentResult(summary=summary, records=records)


def lemma1_monte_carlo(
  m: int, k: int, c: Fraction | float, samples: int, r: RandomStream
) -> float:
  """Fraction of uniform populations of size ``ceil(c m 2^k)`` missing a block.

  A block is missing when no member has that block all ones.
  """
  validate_positive_int("samples", samples)
  mu = lemma1_population(m, k, c)
  missing = 0
  for _ in range(samples):
    blocks = r.bits(mu * m * k).reshape(mu, m, k)
    present = blocks.all(axis=2).any(axis=0)
    missing += int(not present.all())
  return missing / samples
