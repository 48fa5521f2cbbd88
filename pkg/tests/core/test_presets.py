"""Tests for sweep presets."""

from fractions import Fraction

import pytest

from src.core.harness import Algorithm, BudgetPreset, Init
from src.core.presets import (
  PRESETS,
  UnknownPresetError,
  get_preset,
  point_seed,
  run_sweep,
  sweep_specs,
)
from src.core.problems import Shape


class TestPresetTables:
  """Test cases for the preset grids."""

  def test_registered_names(self):
    """Test the preset registry."""
    assert list(PRESETS) == ["fig3", "fig4", "fig6", "fig7"]
    with pytest.raises(UnknownPresetError):
      get_preset("fig5")

  def test_point_counts(self):
    """Test the size of each grid."""
    assert len(get_preset("fig3").points) == 49
    assert len(get_preset("fig4").points) == 24
    assert len(get_preset("fig6").points) == 40
    assert len(get_preset("fig7").points) == 36

  def test_worst_case_standard_grid(self):
    """Test the worst-case standard grid's initializer and budget."""
    gomea = [p for p in get_preset("fig3").points if p.algorithm is not Algorithm.EA]
    assert all(p.init is Init.WORST_STANDARD for p in gomea)
    assert all(p.budget_preset is BudgetPreset.THM2 for p in gomea)
    assert max(p.m for p in gomea if p.k == 7) == 8

  def test_generalized_vs_tailed_grid(self):
    """Test that both shapes share k, b and z."""
    points = get_preset("fig7").points
    assert {p.shape for p in points} == {Shape.GENERALIZED, Shape.TAILED}
    assert {(p.k, p.b, p.z) for p in points} == {(6, Fraction(6), 4)}
    assert {p.c for p in points} == {Fraction(i, 2) for i in range(1, 7)}

  @pytest.mark.parametrize("name", ["fig3", "fig4", "fig6", "fig7"])
  def test_every_point_builds(self, name: str):
    """Test that every grid point yields a valid spec."""
    specs = sweep_specs(get_preset(name), replications=1)
    assert len(specs) == len(get_preset(name).points)
    assert all(spec.budget >= spec.mu for spec in specs)


class TestSweepSpecs:
  """Test cases for seeding and filtering."""

  def test_point_seed(self):
    """Test that point seeds keep the low 32 bits for replications."""
    assert point_seed(5, 0) == 5
    assert point_seed(5, 2) == 5 ^ (2 << 32)
    assert point_seed(2**64 - 1, 1) < 2**64

  def test_filters_keep_seeds(self):
    """Test that filtering does not move a point's seed."""
    preset = get_preset("fig3")
    full = sweep_specs(preset, replications=2, base_seed=11)
    only = sweep_specs(preset, replications=2, base_seed=11, ks=[5], ms=[4])
    assert [s.instance.k for s in only] == [5, 5]
    assert {s.algorithm for s in only} == {Algorithm.GOMEA, Algorithm.GOMEA_MUT}
    seeds = {(s.instance.k, s.instance.m, s.algorithm): s.base_seed for s in full}
    for spec in only:
      key = (spec.instance.k, spec.instance.m, spec.algorithm)
      assert seeds[key] == spec.base_seed

  def test_algorithm_filter(self):
    """Test keeping only the GA."""
    specs = sweep_specs(get_preset("fig4"), algorithms=[Algorithm.GA])
    assert len(specs) == 8
    assert all(s.replications == 1000 for s in specs)

  def test_empty_filter(self):
    """Test filters that match nothing."""
    assert sweep_specs(get_preset("fig4"), ks=[9]) == []


class TestRunSweep:
  """Test cases for running a sweep."""

  def test_runs_in_order(self):
    """Test that results follow the input order."""
    specs = sweep_specs(
      get_preset("fig4"), replications=1, algorithms=[Algorithm.GOMEA]
    )[:2]
    results = run_sweep(specs, progress=False)
    assert [r.summary.spec for r in results] == specs
    assert all(len(r.records) == 1 for r in results)
