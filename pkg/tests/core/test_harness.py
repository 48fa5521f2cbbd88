"""Tests for the experiment harness."""

import math
from fractions import Fraction

import numpy as np
import pytest

from src.core.bitstring import RandomStream
from src.core.fos import FOS
from src.core.harness import (
  Algorithm,
  BudgetPreset,
  ExperimentError,
  ExperimentSpec,
  Init,
  InvalidPairingError,
  RunRecord,
  budget_for_preset,
  default_budget_preset,
  inject_optimum,
  lemma1_monte_carlo,
  population_constant,
  population_size,
  run_experiment,
  run_single,
  success_budget,
  summarize,
  uniform_population,
  worst_case_generalized,
  worst_case_standard,
)
from src.core.problems import ProblemInstance


def small_spec(**overrides) -> ExperimentSpec:
  options = {
    "mu": 10,
    "budget": 500,
    "replications": 6,
    "base_seed": 99,
  }
  options.update(overrides)
  return ExperimentSpec.build(ProblemInstance.standard(2, 3), Algorithm.GOMEA, **options)


class TestParsing:
  """Test cases for algorithm and initializer names."""

  def test_algorithm_aliases(self):
    """Test long and short algorithm names."""
    assert Algorithm.parse("gomea+mutation") is Algorithm.GOMEA_MUT
    assert Algorithm.parse("one_plus_one_ea") is Algorithm.EA
    assert Algorithm.parse(" GA ") is Algorithm.GA
    assert not Algorithm.EA.uses_population
    with pytest.raises(ExperimentError):
      Algorithm.parse("pso")

  def test_init_aliases(self):
    """Test initializer names with underscores."""
    assert Init.parse("worst_case_standard") is Init.WORST_STANDARD
    assert Init.parse("worst-generalized") is Init.WORST_GENERALIZED
    with pytest.raises(ExperimentError):
      Init.parse("random")


class TestInitializers:
  """Test cases for initial populations."""

  def test_uniform_shape(self):
    """Test population size and genome length."""
    pop = uniform_population(5, 12, RandomStream(1))
    assert pop.size == 5
    assert pop.genome_length == 12
    assert not pop.evaluated

  def test_uniform_bit_frequency(self):
    """Test that every position is one about half the time."""
    pop = uniform_population(2_000, 20, RandomStream(8))
    rows = np.array([g.bits for g in pop.genomes])
    freq = rows.mean(axis=0)
    assert np.all(np.abs(freq - 0.5) < 0.05)
    assert rows.mean() == pytest.approx(0.5, abs=0.01)

  def test_worst_case_standard(self):
    """Test that each block is all ones in exactly one individual."""
    inst = ProblemInstance.standard(4, 3)
    pop = worst_case_standard(6, inst, RandomStream(2))
    rows = np.array([g.bits for g in pop.genomes]).reshape(6, 4, 3)
    sums = rows.sum(axis=2)
    assert set(np.unique(sums).tolist()) <= {0, 3}
    assert (rows.all(axis=2).sum(axis=0) == 1).all()

  def test_worst_case_generalized(self):
    """Test that each block holds z+1 ones in one individual only."""
    inst = ProblemInstance.generalized(3, 6, 1, 6, 4)
    pop = worst_case_generalized(5, inst, RandomStream(3))
    rows = np.array([g.bits for g in pop.genomes]).reshape(5, 3, 6)
    per_block = rows.sum(axis=2)
    assert (per_block.sum(axis=0) == 5).all()
    assert ((per_block == 5).sum(axis=0) == 1).all()

  def test_pairing(self):
    """Test that initializers refuse the wrong shape."""
    with pytest.raises(InvalidPairingError):
      worst_case_standard(4, ProblemInstance.generalized(2, 6, 1, 6, 4), RandomStream(0))
    with pytest.raises(InvalidPairingError):
      worst_case_generalized(4, ProblemInstance.standard(2, 4), RandomStream(0))

  def test_inject_optimum(self):
    """Test that slot 0 becomes all ones."""
    pop = inject_optimum(uniform_population(3, 8, RandomStream(4)))
    assert str(pop.genomes[0]) == "11111111"


class TestBudgets:
  """Test cases for sizing and budget presets."""

  def test_population_size(self):
    """Test mu for both trap families."""
    assert population_size(ProblemInstance.standard(6, 4), Fraction(1)) == 96
    assert population_size(ProblemInstance.generalized(8, 6, 1, 6, 4), Fraction(1)) == 74

  def test_population_constant(self):
    """Test the inverse mapping from mu to c."""
    assert population_constant(ProblemInstance.standard(6, 4), 48) == Fraction(1, 2)

  def test_success_budget(self):
    """Test the success budgets and the GA factors."""
    standard = ProblemInstance.standard(6, 4)
    assert success_budget(standard, 1, Algorithm.GOMEA) == 6912
    assert success_budget(standard, 1, Algorithm.GA) == 69120
    gen = ProblemInstance.generalized(8, 6, 1, 6, 4)
    assert success_budget(gen, 1, Algorithm.GOMEA_MUT) == 9362
    assert success_budget(gen, 1, Algorithm.GA) == 187245

  def test_theory_presets(self):
    """Test budgets ten times a bound."""
    inst = ProblemInstance.standard(6, 4)
    assert budget_for_preset(BudgetPreset.THM2, inst, 1, Algorithm.GOMEA) == 34560
    ea = budget_for_preset(BudgetPreset.THM1, inst, 1, Algorithm.EA)
    assert ea == math.ceil(10 * (math.e * (1 + math.log(6)) * 24**4))
    with pytest.raises(ExperimentError):
      budget_for_preset(
        BudgetPreset.THM3,
        ProblemInstance.generalized(1, 6, 1, 6, 4),
        1,
        Algorithm.GOMEA_MUT,
      )

  def test_default_preset(self):
    """Test the default preset per algorithm and shape."""
    assert default_budget_preset(ProblemInstance.standard(3, 5), Algorithm.EA) == "thm1"
    assert (
      default_budget_preset(ProblemInstance.standard(6, 4), Algorithm.GA)
      is BudgetPreset.S42
    )
    tailed = ProblemInstance.tailed(8, 6, 5, 6, 4)
    assert default_budget_preset(tailed, Algorithm.GOMEA) is BudgetPreset.S632
    with pytest.raises(ExperimentError):
      default_budget_preset(ProblemInstance.standard(3, 5), Algorithm.GOMEA)


class TestExperimentSpec:
  """Test cases for building and validating specs."""

  def test_build_from_defaults(self):
    """Test that c defaults to 1 and the budget to the instance preset."""
    spec = ExperimentSpec.build(ProblemInstance.standard(6, 4), Algorithm.GOMEA)
    assert spec.mu == 96
    assert spec.c == 1
    assert spec.budget == 6912
    assert spec.budget_preset is BudgetPreset.S42

  def test_explicit_budget_clears_preset(self):
    """Test that a budget replaces the preset."""
    spec = small_spec()
    assert spec.budget == 500
    assert spec.budget_preset is None
    assert spec.c == Fraction(10, 16)

  def test_ea(self):
    """Test the EA's unit population and default rate."""
    spec = ExperimentSpec.build(ProblemInstance.standard(2, 3), Algorithm.EA)
    assert spec.mu == 1
    assert spec.rate == pytest.approx(1 / 6)
    assert spec.budget_preset is BudgetPreset.THM1

  def test_rejections(self):
    """Test inconsistent settings."""
    inst = ProblemInstance.standard(2, 3)
    with pytest.raises(ExperimentError):
      ExperimentSpec.build(inst, Algorithm.GOMEA, mu=10, c=1, budget=100)
    with pytest.raises(ExperimentError):
      ExperimentSpec.build(inst, Algorithm.GOMEA, mu=1, budget=100)
    with pytest.raises(ExperimentError):
      ExperimentSpec.build(inst, Algorithm.GOMEA, mu=10, budget=5)
    with pytest.raises(InvalidPairingError):
      ExperimentSpec.build(inst, Algorithm.EA, init=Init.WORST_STANDARD, budget=100)
    with pytest.raises(InvalidPairingError):
      ExperimentSpec.build(inst, Algorithm.EA, budget=100, seeded_optimum=True)
    with pytest.raises(InvalidPairingError):
      ExperimentSpec.build(
        inst, Algorithm.GOMEA, mu=10, init=Init.WORST_GENERALIZED, budget=100
      )
    with pytest.raises(ExperimentError):
      ExperimentSpec.build(
        inst, Algorithm.GOMEA, mu=10, budget=100, fos=FOS.of([[0, 1]], 2)
      )

  def test_echo_reproduces_spec(self):
    """Test that header fields rebuild the same spec."""
    spec = ExperimentSpec.build(
      ProblemInstance.standard(3, 3),
      Algorithm.GOMEA_MUT,
      mu=12,
      budget=900,
      replications=4,
      base_seed=7,
      fos=FOS.of([range(6), range(6, 9)], 9),
    )
    fields = spec.echo()
    assert fields["fos"] == "0,1,2,3,4,5|6,7,8"
    assert fields["rng_id"].startswith("numpy-PCG64/")
    assert ExperimentSpec.from_echo(fields) == spec

  def test_from_echo_missing_field(self):
    """Test a header without the algorithm."""
    fields = small_spec().echo()
    del fields["algorithm"]
    with pytest.raises(ExperimentError, match="algorithm"):
      ExperimentSpec.from_echo(fields)


class TestRuns:
  """Test cases for replicated runs and summaries."""

  def test_run_single_seed(self):
    """Test that replication seeds are base_seed XOR rep."""
    spec = small_spec()
    assert run_single(spec, 3).seed == 99 ^ 3

  def test_run_single_is_deterministic(self):
    """Test that one replication always gives the same outcome."""
    spec = small_spec()
    assert run_single(spec, 2) == run_single(spec, 2)

  def test_workers_do_not_change_results(self):
    """Test inline and pooled execution agree record by record."""
    spec = small_spec()
    inline = run_experiment(spec, workers=1)
    pooled = run_experiment(spec, workers=2)
    assert inline.records == pooled.records
    assert inline.summary == pooled.summary
    assert [rec.rep for rec in pooled.records] == list(range(6))

  def test_seeded_optimum(self):
    """Test that a seeded optimum is hit by the first evaluation."""
    result = run_experiment(small_spec(seeded_optimum=True))
    assert all(rec.hitting_time == 1 for rec in result.records)
    assert result.summary.mean_hitting_time == 1.0
    assert result.summary.std_hitting_time == 0.0

  def test_every_algorithm_runs(self):
    """Test one replication of each algorithm on a tiny instance."""
    inst = ProblemInstance.standard(2, 3)
    for alg in Algorithm:
      mu = None if alg is Algorithm.EA else 20
      spec = ExperimentSpec.build(inst, alg, mu=mu, budget=20_000, replications=2)
      result = run_experiment(spec)
      assert len(result.records) == 2
      assert result.summary.total_evaluations <= 40_000

  def test_summarize_statistics(self):
    """Test success counts, mean and sample deviation."""
    spec = small_spec()
    records = (
      RunRecord(0, 99, True, 30, 30),
      RunRecord(1, 98, False, None, 500),
      RunRecord(2, 97, True, 10, 10),
    )
    row = summarize(spec, records)
    assert row.successes == 2
    assert row.censored == 1
    assert row.success_rate == pytest.approx(2 / 3)
    assert row.mean_hitting_time == 20.0
    assert row.std_hitting_time == pytest.approx(math.sqrt(200))
    assert row.total_evaluations == 540
    assert row.bound_value == 2**3 * 2**3 * float(Fraction(10, 16))
    assert summarize(spec, tuple(reversed(records))) == row

  def test_summarize_without_successes(self):
    """Test that statistics are empty when nothing hit."""
    row = summarize(small_spec(), (RunRecord(0, 99, False, None, 500),))
    assert row.mean_hitting_time is None
    assert row.std_hitting_time is None
    assert row.success_rate == 0.0


class TestLemma1MonteCarlo:
  """Test cases for the initial-population coverage estimate."""

  def test_large_population_covers_blocks(self):
    """Test that c=4 almost never misses a block."""
    assert lemma1_monte_carlo(2, 2, 4, 200, RandomStream(5)) <= 0.02

  def test_small_population_misses(self):
    """Test that a tiny c often misses one."""
    assert lemma1_monte_carlo(4, 4, 0.125, 200, RandomStream(5)) > 0.5
