"""Search algorithms: GOMEA, (1+1) EA and (mu+1) GA with deterministic crowding.

Runtimes are measured in full fitness evaluations. Every runner owns one
``EvalCounter`` with the run's budget; loops check ``ctr.done`` before each
evaluation, so a run stops exactly at the first evaluation of a global optimum
or when the budget is spent.
"""

import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from ..utils.validation import validate_positive_int, validate_probability
from .bitstring import BitString, BitStringError, Bits, RandomStream, hamming
from .fos import FOS, FOSError
from .problems import EvalCounter, ProblemInstance

logger = logging.getLogger(__name__)


class AlgorithmError(ValueError):
  """Base exception for search algorithm misuse."""

  pass


class PopulationTooSmallError(AlgorithmError):
  """Raised when an operator needs more individuals than available."""

  pass


class BudgetTooSmallError(AlgorithmError):
  """Raised when the budget cannot cover the initial evaluations."""

  pass


@dataclass(frozen=True)
class Individual:
  """Genome with its cached fitness, stored as a scaled integer score."""

  genome: BitString
  score: int

  def fitness(self, inst: ProblemInstance) -> Fraction:
    return inst.fitness_of_score(self.score)


def evaluate(genome: BitString, inst: ProblemInstance, ctr: EvalCounter) -> Individual:
  inst.check_length(genome)
  return Individual(genome, inst.score(genome.bits, ctr))


class Population:
  """Fixed-size multiset of genomes, scored once the algorithm evaluates it."""

  def __init__(self, genomes: Sequence[BitString]):
    if not genomes:
      raise PopulationTooSmallError("population must not be empty")
    length = len(genomes[0])
    if any(len(g) != length for g in genomes):
      raise BitStringError("all genomes of a population must have the same length")
    self.genomes: list[BitString] = list(genomes)
    self.scores: list[int] = []

  @property
  def size(self) -> int:
    return len(self.genomes)

  @property
  def genome_length(self) -> int:
    return len(self.genomes[0])

  @property
  def evaluated(self) -> bool:
    return len(self.scores) == len(self.genomes)

  def __len__(self) -> int:
    return len(self.genomes)

  def __iter__(self) -> Iterator[BitString]:
    return iter(self.genomes)

  def __getitem__(self, index: int) -> Individual:
    return Individual(self.genomes[index], self.scores[index])

  def __setitem__(self, index: int, ind: Individual) -> None:
    if len(ind.genome) != self.genome_length:
      raise BitStringError(
        f"genome length {len(ind.genome)} does not match population length "
        f"{self.genome_length}"
      )
    self.genomes[index] = ind.genome
    self.scores[index] = ind.score

  def evaluate(self, inst: ProblemInstance, ctr: EvalCounter) -> bool:
    """Score every member in order.

    Returns:
        True if a global optimum was evaluated, in which case the remaining
        members are left unscored
    """
    if self.genome_length != inst.length:
      raise BitStringError(
        f"population genome length {self.genome_length} does not match m*k = "
        f"{inst.length}"
      )
    self.scores = []
    for genome in self.genomes:
      self.scores.append(inst.score(genome.bits, ctr))
      if ctr.hit:
        return True
    return False


@dataclass(frozen=True)
class RunOutcome:
  """Result of one run; ``hitting_time`` is None unless ``hit``."""

  hit: bool
  hitting_time: int | None
  evaluations_used: int

  @classmethod
  def from_counter(cls, ctr: EvalCounter) -> "RunOutcome":
    return cls(hit=ctr.hit, hitting_time=ctr.hitting_time, evaluations_used=ctr.count)


class GomStep(NamedTuple):
  """One mask application inside GOM, recorded when tracing."""

  subset: int
  donor: int
  offspring: BitString
  score: int
  accepted: bool


def _mask_indices(
  mask: Iterable[int] | NDArray[np.intp], length: int
) -> NDArray[np.intp]:
  ordered = mask if isinstance(mask, np.ndarray) else sorted(mask)
  idx = np.asarray(ordered, dtype=np.intp)
  if idx.size and (idx.min() < 0 or idx.max() >= length):
    raise BitStringError(f"mask index out of range [0, {length})")
  return idx


def cross_with_mask(
  receiver: BitString, donor: BitString, mask: Iterable[int]
) -> BitString:
  """Copy of ``receiver`` with the positions in ``mask`` taken from ``donor``.

  Raises:
      BitStringError: On length mismatch or an out-of-range mask index
  """
  if len(receiver) != len(donor):
    raise BitStringError(f"length mismatch: {len(receiver)} != {len(donor)}")
  idx = _mask_indices(mask, len(receiver))
  child = receiver.bits.copy()
  child[idx] = donor.bits[idx]
  return BitString._wrap(child)


def _flip_masked(
  bits: Bits, idx: NDArray[np.intp], rate: float, r: RandomStream
) -> None:
  flips = r.coins(idx.size, rate)
  bits[idx[flips]] ^= 1


def local_mutation(
  s: BitString, mask: Iterable[int], rate: float, r: RandomStream
) -> BitString:
  """Flip each bit of ``mask`` independently with probability ``rate``."""
  validate_probability("rate", rate)
  idx = _mask_indices(mask, len(s))
  child = s.bits.copy()
  _flip_masked(child, idx, rate, r)
  return BitString._wrap(child)


def gom_accepts(offspring_score: int, parent_score: int) -> bool:
  """GOM keeps an offspring only on strict improvement."""
  return offspring_score > parent_score


def ea_accepts(offspring_score: int, parent_score: int) -> bool:
  """The (1+1) EA also accepts equally fit offspring."""
  return offspring_score >= parent_score


def _gom(
  p0: int,
  pop: Population,
  masks: Sequence[NDArray[np.intp]],
  inst: ProblemInstance,
  ctr: EvalCounter,
  r: RandomStream,
  rate: float,
  order: Sequence[int] | None = None,
  donors: Sequence[int] | None = None,
  trace: list[GomStep] | None = None,
) -> Individual:
  mu = pop.size
  if order is None:
    order = r.permutation(len(masks)).tolist()
  if donors is None:
    # uniform over the other mu-1 slots
    draws = r.integers(mu - 1, len(masks))
    donors = (draws + (draws >= p0)).tolist()

  work_bits = pop.genomes[p0].bits
  work_score = pop.scores[p0]
  for fi, d in zip(order, donors):
    if ctr.done:
      break
    idx = masks[fi]
    child = work_bits.copy()
    child[idx] = pop.genomes[d].bits[idx]
    if rate > 0:
      _flip_masked(child, idx, rate, r)
    score = inst.score(child, ctr)
    accepted = gom_accepts(score, work_score)
    if trace is not None:
      trace.append(GomStep(fi, d, BitString._wrap(child.copy()), score, accepted))
    if accepted:
      work_bits, work_score = child, score
  return Individual(BitString._wrap(work_bits.copy()), work_score)


def gom(
  p0: int,
  pop: Population,
  f: FOS,
  inst: ProblemInstance,
  ctr: EvalCounter,
  r: RandomStream,
  mutate: bool = False,
  rate: float | None = None,
  *,
  order: Sequence[int] | None = None,
  donors: Sequence[int] | None = None,
  trace: list[GomStep] | None = None,
) -> Individual:
  """Gene-pool optimal mixing of the individual in slot ``p0``.

  The FOS is walked in a fresh random order; for each subset a donor is drawn
  uniformly from the other slots, the masked bits are copied in (then mutated
  with ``rate``, default ``1/k``, if ``mutate``), the offspring is evaluated and
  kept only if strictly fitter. Consumes ``len(f)`` evaluations unless the
  counter reports done first.

  Args:
      p0: Population slot of the working individual
      pop: Evaluated population providing the donors
      f: Linkage model over the genome
      inst: Problem being optimized
      ctr: Evaluation counter of the run
      r: Random stream of the run
      mutate: Apply local mutation on the mask after crossover
      rate: Local mutation rate, defaults to 1/k
      order: Scripted subset order (replaces the random traversal)
      donors: Scripted donor slots, one per step
      trace: If given, every step is appended to it

  Returns:
      The final working individual

  Raises:
      PopulationTooSmallError: If the population has fewer than two members
  """
  if pop.size < 2:
    raise PopulationTooSmallError(f"GOM needs at least 2 individuals, got {pop.size}")
  if not pop.evaluated:
    raise AlgorithmError("GOM needs an evaluated population")
  if f.genome_length != inst.length:
    raise FOSError(f"FOS covers {f.genome_length} positions, genome has {inst.length}")
  if not 0 <= p0 < pop.size:
    raise AlgorithmError(f"slot {p0} out of range [0, {pop.size})")
  if mutate:
    rate = 1.0 / inst.k if rate is None else rate
    validate_probability("rate", rate)
  else:
    rate = 0.0
  if donors is not None and any(d == p0 or not 0 <= d < pop.size for d in donors):
    raise AlgorithmError("scripted donors must be other population slots")
  return _gom(p0, pop, f.masks(), inst, ctr, r, rate, order, donors, trace)


def _check_run(inst: ProblemInstance, pop: Population, mu: int, budget: int) -> None:
  if mu < 2:
    raise PopulationTooSmallError(f"population size must be at least 2, got {mu}")
  if pop.size != mu:
    raise AlgorithmError(f"initial population has {pop.size} members, expected {mu}")
  if budget < mu:
    raise BudgetTooSmallError(
      f"budget {budget} cannot cover the {mu} initial evaluations"
    )
  if pop.genome_length != inst.length:
    raise BitStringError(
      f"initial genomes have length {pop.genome_length}, expected {inst.length}"
    )


def gomea_run(
  inst: ProblemInstance,
  f: FOS,
  mu: int,
  budget: int,
  init: Population,
  r: RandomStream,
  mutate: bool = False,
  rate: float | None = None,
) -> RunOutcome:
  """Run GOMEA with a persistent population until the optimum or the budget.

  The initial population is evaluated once (``mu`` evaluations); afterwards
  each step picks a slot uniformly, applies GOM and writes the result back.

  Raises:
      PopulationTooSmallError: If mu < 2
      BudgetTooSmallError: If budget < mu
  """
  _check_run(inst, init, mu, budget)
  if f.genome_length != inst.length:
    raise FOSError(f"FOS covers {f.genome_length} positions, genome has {inst.length}")
  if mutate:
    rate = 1.0 / inst.k if rate is None else rate
    validate_probability("rate", rate)
  else:
    rate = 0.0

  ctr = EvalCounter(budget)
  pop = Population(init.genomes)
  if pop.evaluate(inst, ctr):
    return RunOutcome.from_counter(ctr)

  masks = f.masks()
  while not ctr.done:
    p0 = r.draw_index(mu)
    pop[p0] = _gom(p0, pop, masks, inst, ctr, r, rate)
  return RunOutcome.from_counter(ctr)


def one_plus_one_ea_run(
  inst: ProblemInstance, rate: float, budget: int, r: RandomStream
) -> RunOutcome:
  """(1+1) EA with standard bit mutation and elitist ``>=`` acceptance.

  Raises:
      ValueError: If rate is not in (0, 1)
  """
  if not 0 < rate < 1:
    raise ValueError(f"rate must lie in (0, 1), got {rate}")
  validate_positive_int("budget", budget)
  ctr = EvalCounter(budget)
  n = inst.length

  parent = r.bits(n)
  parent_score = inst.score(parent, ctr)
  while not ctr.done:
    child = parent ^ r.coins(n, rate).astype(np.uint8)
    score = inst.score(child, ctr)
    if ea_accepts(score, parent_score):
      parent, parent_score = child, score
  return RunOutcome.from_counter(ctr)


def uniform_crossover(
  a: BitString, b: BitString, coins: NDArray[np.bool_]
) -> BitString:
  """Take position ``i`` from ``a`` where ``coins[i]`` is true, else from ``b``."""
  if len(a) != len(b) or len(a) != coins.size:
    raise BitStringError("uniform crossover needs equal lengths")
  return BitString._wrap(np.where(coins, a.bits, b.bits).astype(np.uint8))


def crowding_target(offspring: BitString, first: BitString, second: BitString) -> int:
  """0 if the offspring is at least as close to ``first`` as to ``second``, else 1."""
  return 0 if hamming(offspring, first) <= hamming(offspring, second) else 1


def mu_plus_one_dc_ga_run(
  inst: ProblemInstance,
  mu: int,
  budget: int,
  init: Population,
  r: RandomStream,
  mutation_rate: float = 0.0,
) -> RunOutcome:
  """(mu+1) GA with uniform selection, uniform crossover and deterministic crowding.

  Each step draws two distinct parents, builds one offspring, and lets it
  replace the Hamming-closer parent (ties go to the first parent) if it is
  strictly fitter.

  Raises:
      PopulationTooSmallError: If mu < 2
      BudgetTooSmallError: If budget < mu
  """
  _check_run(inst, init, mu, budget)
  validate_probability("mutation_rate", mutation_rate)
  ctr = EvalCounter(budget)
  pop = Population(init.genomes)
  if pop.evaluate(inst, ctr):
    return RunOutcome.from_counter(ctr)

  n = inst.length
  while not ctr.done:
    i = r.draw_index(mu)
    j = r.draw_index(mu - 1)
    if j >= i:
      j += 1
    first, second = pop.genomes[i], pop.genomes[j]
    child = uniform_crossover(first, second, r.coins(n))
    if mutation_rate > 0:
      child = local_mutation(child, range(n), mutation_rate, r)
    score = inst.score(child.bits, ctr)
    target = (i, j)[crowding_target(child, first, second)]
    if score > pop.scores[target]:
      pop[target] = Individual(child, score)
  return RunOutcome.from_counter(ctr)
