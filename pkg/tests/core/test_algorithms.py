"""Tests for GOM, GOMEA, the (1+1) EA and the (mu+1) GA."""

from fractions import Fraction

import numpy as np
import pytest

from src.core.algorithms import (
  AlgorithmError,
  BudgetTooSmallError,
  GomStep,
  Population,
  PopulationTooSmallError,
  crowding_target,
  cross_with_mask,
  ea_accepts,
  gom,
  gom_accepts,
  gomea_run,
  local_mutation,
  mu_plus_one_dc_ga_run,
  one_plus_one_ea_run,
  uniform_crossover,
)
from src.core.bitstring import BitString, BitStringError, RandomStream
from src.core.fos import FOS, truthful_mp_fos
from src.core.problems import (
  EvalCounter,
  ProblemInstance,
  count_optimal_blocks,
  region_membership,
)


def bits(text: str) -> BitString:
  return BitString.from_str(text)


def worked_population() -> Population:
  return Population(
    [bits("111011011"), bits("000000110"), bits("101111001"), bits("010111000")]
  )


class TestOperators:
  """Test cases for the variation helpers."""

  def test_cross_with_mask(self):
    """Test copying a mask from a donor."""
    receiver = bits("111011011")
    assert str(cross_with_mask(receiver, bits("000000110"), {0, 1, 2})) == "000011011"
    assert str(cross_with_mask(receiver, bits("101111001"), {3, 4, 5})) == "111111011"
    assert cross_with_mask(receiver, bits("000000110"), set()) == receiver

  def test_cross_with_mask_errors(self):
    """Test length and index checks."""
    with pytest.raises(BitStringError):
      cross_with_mask(bits("111"), bits("11"), {0})
    with pytest.raises(BitStringError):
      cross_with_mask(bits("111"), bits("000"), {3})

  def test_local_mutation_extremes(self):
    """Test rates 0 and 1 on a mask."""
    r = RandomStream(5)
    s = bits("110011")
    assert local_mutation(s, {0, 1, 2}, 0.0, r) == s
    assert str(local_mutation(s, {0, 1, 2}, 1.0, r)) == "001011"

  def test_acceptance_rules(self):
    """Test strict GOM acceptance against the EA's."""
    assert gom_accepts(6, 5)
    assert not gom_accepts(5, 5)
    assert ea_accepts(5, 5)
    assert not ea_accepts(4, 5)

  def test_uniform_crossover(self):
    """Test that true coins take the first parent."""
    coins = np.array([True, True, True, False, False, False])
    child = uniform_crossover(bits("111111"), bits("000000"), coins)
    assert str(child) == "111000"

  def test_crowding_target(self):
    """Test the Hamming-closer parent, ties going to the first."""
    assert crowding_target(bits("1100"), bits("1100"), bits("0011")) == 0
    assert crowding_target(bits("0010"), bits("1100"), bits("0011")) == 1
    assert crowding_target(bits("1010"), bits("1100"), bits("0011")) == 0


class TestOperatorStatistics:
  """Seeded randomized checks of the variation operators."""

  def test_local_mutation_mean_flips(self):
    """Test that a mask of size 4 at rate 1/4 flips one bit on average."""
    r = RandomStream(31)
    s = BitString.zeros(12)
    mask = {1, 4, 7, 10}
    trials = 100_000
    flips = 0
    for _ in range(trials):
      child = local_mutation(s, mask, 0.25, r)
      assert not np.delete(child.bits, sorted(mask)).any()
      flips += int(child.bits.sum())
    assert flips / trials == pytest.approx(1.0, rel=0.02)

  def test_cross_with_mask_touches_only_mask(self):
    """Test random receivers, donors and masks."""
    r = RandomStream(32)
    for _ in range(2_000):
      n = 1 + r.draw_index(30)
      receiver, donor = BitString(r.bits(n)), BitString(r.bits(n))
      mask = set(r.sample(n, 1 + r.draw_index(n)).tolist())
      child = cross_with_mask(receiver, donor, mask)
      for i in range(n):
        expected = donor[i] if i in mask else receiver[i]
        assert child[i] == expected


class TestGom:
  """Test cases for gene-pool optimal mixing."""

  def test_truthful_trace(self):
    """Test the worked truthful sequence: reject, accept, accept."""
    inst = ProblemInstance.standard(3, 3)
    pop = worked_population()
    ctr = EvalCounter()
    pop.evaluate(inst, ctr)
    assert pop.scores == [3, 4, 4, 6]
    trace: list[GomStep] = []

    result = gom(
      0,
      pop,
      truthful_mp_fos(3, 3),
      inst,
      ctr,
      RandomStream(0),
      order=[0, 1, 2],
      donors=[1, 2, 3],
      trace=trace,
    )

    assert [str(step.offspring) for step in trace] == [
      "000011011",
      "111111011",
      "111111000",
    ]
    assert [step.score for step in trace] == [2, 6, 8]
    assert [step.accepted for step in trace] == [False, True, True]
    assert str(result.genome) == "111111000"
    assert result.fitness(inst) == 8
    assert ctr.count == 7

  def test_untruthful_trace_loses_optimal_block(self):
    """Test that a block-spanning subset trades away an optimal block."""
    inst = ProblemInstance.standard(3, 3)
    pop = worked_population()
    ctr = EvalCounter()
    pop.evaluate(inst, ctr)
    trace: list[GomStep] = []
    untruthful = FOS.of([range(6), range(6, 9)], 9)

    result = gom(
      0,
      pop,
      untruthful,
      inst,
      ctr,
      RandomStream(0),
      order=[0, 1],
      donors=[1, 3],
      trace=trace,
    )

    assert [step.score for step in trace] == [4, 6]
    assert all(step.accepted for step in trace)
    assert str(result.genome) == "000000000"
    assert count_optimal_blocks(pop.genomes[0], inst) == 1
    assert count_optimal_blocks(result.genome, inst) == 0

  def test_does_not_modify_population(self):
    """Test that GOM returns a new individual."""
    inst = ProblemInstance.standard(3, 3)
    pop = worked_population()
    pop.evaluate(inst, EvalCounter())
    gom(0, pop, truthful_mp_fos(3, 3), inst, EvalCounter(), RandomStream(1))
    assert str(pop.genomes[0]) == "111011011"
    assert pop.scores[0] == 3

  def test_random_donors_exclude_self(self):
    """Test that random donors never equal the working slot."""
    inst = ProblemInstance.standard(3, 3)
    pop = worked_population()
    pop.evaluate(inst, EvalCounter())
    r = RandomStream(9)
    for p0 in range(4):
      trace: list[GomStep] = []
      gom(p0, pop, truthful_mp_fos(3, 3), inst, EvalCounter(), r, trace=trace)
      assert all(step.donor != p0 for step in trace)
      assert sorted(step.subset for step in trace) == [0, 1, 2]

  def test_identical_donors_leave_individual_unchanged(self):
    """Test that mixing with copies of itself changes nothing but costs |FOS|."""
    inst = ProblemInstance.standard(3, 3)
    pop = Population([bits("110010001")] * 3)
    ctr = EvalCounter()
    pop.evaluate(inst, ctr)
    result = gom(1, pop, truthful_mp_fos(3, 3), inst, ctr, RandomStream(6))
    assert result.genome == pop.genomes[1]
    assert ctr.count == 6

  def test_stops_at_budget(self):
    """Test that GOM stops once the counter is exhausted."""
    inst = ProblemInstance.standard(3, 3)
    pop = worked_population()
    ctr = EvalCounter(5)
    pop.evaluate(inst, ctr)
    trace: list[GomStep] = []
    gom(0, pop, truthful_mp_fos(3, 3), inst, ctr, RandomStream(0), trace=trace)
    assert len(trace) == 1
    assert ctr.count == 5

  def test_errors(self):
    """Test misuse of GOM."""
    inst = ProblemInstance.standard(3, 3)
    f = truthful_mp_fos(3, 3)
    pop = worked_population()
    with pytest.raises(AlgorithmError):
      gom(0, pop, f, inst, EvalCounter(), RandomStream(0))
    pop.evaluate(inst, EvalCounter())
    with pytest.raises(AlgorithmError):
      gom(0, pop, f, inst, EvalCounter(), RandomStream(0), donors=[0, 1, 2])
    single = Population([bits("111011011")])
    single.evaluate(inst, EvalCounter())
    with pytest.raises(PopulationTooSmallError):
      gom(0, single, f, inst, EvalCounter(), RandomStream(0))

  def test_region_membership_never_lost(self):
    """Test that accepted truthful steps keep every block already in its region."""
    r = RandomStream(2024)
    accepted = 0
    violations = 0
    trials = 0
    while accepted < 10_000 and trials < 50_000:
      trials += 1
      k = 2 + r.draw_index(5)
      m = 1 + r.draw_index(8)
      choice = r.draw_index(3)
      if choice == 0:
        inst = ProblemInstance.standard(m, k)
      else:
        a = 1 + r.draw_index(5)
        b = a + 1 + r.draw_index(5)
        z = 1 + r.draw_index(k - 1)
        factory = ProblemInstance.generalized if choice == 1 else ProblemInstance.tailed
        inst = factory(m, k, Fraction(a), Fraction(b), z)
      mu = 2 + r.draw_index(7)
      pop = Population([BitString(r.bits(inst.length)) for _ in range(mu)])
      if pop.evaluate(inst, EvalCounter()):
        continue
      p0 = r.draw_index(mu)
      trace: list[GomStep] = []
      gom(p0, pop, truthful_mp_fos(m, k), inst, EvalCounter(), r, trace=trace)

      current = region_membership(pop.genomes[p0], inst)
      for step in trace:
        if not step.accepted:
          continue
        accepted += 1
        after = region_membership(step.offspring, inst)
        if (current & ~after).any():
          violations += 1
        current = after
    assert accepted >= 10_000
    assert violations == 0


class TestGomea:
  """Test cases for the GOMEA runner."""

  def test_optimum_in_initial_population(self):
    """Test that the hitting time counts the initial evaluations."""
    inst = ProblemInstance.standard(2, 3)
    genomes = [BitString.zeros(6)] * 4
    genomes[2] = BitString.ones(6)
    outcome = gomea_run(
      inst, truthful_mp_fos(2, 3), 4, 100, Population(genomes), RandomStream(0)
    )
    assert outcome.hit
    assert outcome.hitting_time == 3
    assert outcome.evaluations_used == 3

  def test_solves_small_instance(self):
    """Test that a large uniform population solves a small trap."""
    inst = ProblemInstance.standard(2, 3)
    r = RandomStream(17)
    init = Population([BitString(r.bits(6)) for _ in range(80)])
    outcome = gomea_run(inst, truthful_mp_fos(2, 3), 80, 10_000, init, r)
    assert outcome.hit
    assert outcome.hitting_time is not None
    assert outcome.hitting_time <= outcome.evaluations_used <= 10_000

  def test_budget_is_respected(self):
    """Test that a deceptive start with a tight budget stops at the budget."""
    inst = ProblemInstance.standard(4, 4)
    init = Population([BitString.zeros(16)] * 4)
    outcome = gomea_run(inst, truthful_mp_fos(4, 4), 4, 50, init, RandomStream(3))
    assert not outcome.hit
    assert outcome.hitting_time is None
    assert outcome.evaluations_used == 50

  def test_worst_case_start_is_reproducible(self):
    """Test m=3, k=3 from one copy of each optimal block, twice with one seed."""
    inst = ProblemInstance.standard(3, 3)

    def once() -> tuple[bool, int | None, int]:
      r = RandomStream(31)
      genomes = [BitString.zeros(9)] * 24
      for i in range(3):
        genomes[5 * i] = cross_with_mask(
          genomes[5 * i], BitString.ones(9), range(3 * i, 3 * i + 3)
        )
      out = gomea_run(inst, truthful_mp_fos(3, 3), 24, 10**6, Population(genomes), r)
      return out.hit, out.hitting_time, out.evaluations_used

    first = once()
    assert first[0]
    assert first == once()

  def test_mutation_is_deterministic(self):
    """Test that two runs with one seed agree."""
    inst = ProblemInstance.standard(3, 4)

    def once() -> tuple[bool, int | None, int]:
      r = RandomStream(8)
      init = Population([BitString(r.bits(12)) for _ in range(20)])
      out = gomea_run(inst, truthful_mp_fos(3, 4), 20, 3000, init, r, mutate=True)
      return out.hit, out.hitting_time, out.evaluations_used

    assert once() == once()

  def test_argument_checks(self):
    """Test population and budget checks."""
    inst = ProblemInstance.standard(2, 3)
    f = truthful_mp_fos(2, 3)
    with pytest.raises(PopulationTooSmallError):
      gomea_run(inst, f, 1, 10, Population([BitString.zeros(6)]), RandomStream(0))
    init = Population([BitString.zeros(6)] * 4)
    with pytest.raises(BudgetTooSmallError):
      gomea_run(inst, f, 4, 3, init, RandomStream(0))
    with pytest.raises(AlgorithmError):
      gomea_run(inst, f, 5, 100, init, RandomStream(0))


class TestOnePlusOneEA:
  """Test cases for the (1+1) EA."""

  def test_solves_small_trap(self):
    """Test m=2, k=3 within a generous budget."""
    outcome = one_plus_one_ea_run(
      ProblemInstance.standard(2, 3), 1 / 6, 100_000, RandomStream(4)
    )
    assert outcome.hit
    assert outcome.hitting_time == outcome.evaluations_used

  def test_budget(self):
    """Test that the EA stops at its budget."""
    outcome = one_plus_one_ea_run(
      ProblemInstance.standard(4, 5), 0.05, 20, RandomStream(4)
    )
    assert outcome.evaluations_used <= 20

  def test_rate_range(self):
    """Test that the rate must lie strictly inside (0, 1)."""
    with pytest.raises(ValueError):
      one_plus_one_ea_run(ProblemInstance.standard(2, 3), 0.0, 10, RandomStream(0))
    with pytest.raises(ValueError):
      one_plus_one_ea_run(ProblemInstance.standard(2, 3), 1.0, 10, RandomStream(0))


class TestDeterministicCrowdingGA:
  """Test cases for the (mu+1) GA."""

  def test_optimum_in_initial_population(self):
    """Test the first evaluation hitting the optimum."""
    inst = ProblemInstance.standard(2, 3)
    init = Population([BitString.ones(6)] + [BitString.zeros(6)] * 3)
    outcome = mu_plus_one_dc_ga_run(inst, 4, 100, init, RandomStream(0))
    assert outcome.hitting_time == 1

  def test_combines_complementary_parents(self):
    """Test that two parents holding different optimal blocks can be combined."""
    inst = ProblemInstance.standard(2, 3)
    init = Population([bits("111000"), bits("000111")])
    outcome = mu_plus_one_dc_ga_run(inst, 2, 5_000, init, RandomStream(12))
    assert outcome.hit

  def test_single_step_example(self):
    """Test the offspring that combines both optimal blocks."""
    first, second = bits("111000"), bits("000111")
    coins = np.array([True, True, True, False, False, False])
    child = uniform_crossover(first, second, coins)
    assert str(child) == "111111"
    assert crowding_target(child, first, second) == 0
    inst = ProblemInstance.standard(2, 3)
    assert inst.score(child.bits, EvalCounter()) > inst.score(first.bits, EvalCounter())

  def test_budget_and_checks(self):
    """Test budget accounting and argument checks."""
    inst = ProblemInstance.standard(4, 4)
    init = Population([BitString.zeros(16)] * 3)
    outcome = mu_plus_one_dc_ga_run(inst, 3, 40, init, RandomStream(1))
    assert not outcome.hit
    assert outcome.evaluations_used == 40
    with pytest.raises(BudgetTooSmallError):
      mu_plus_one_dc_ga_run(inst, 3, 2, init, RandomStream(1))
    with pytest.raises(ValueError):
      mu_plus_one_dc_ga_run(inst, 3, 40, init, RandomStream(1), mutation_rate=2.0)
