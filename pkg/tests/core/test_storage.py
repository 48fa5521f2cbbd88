"""Tests for storage management."""

import os
import shutil
import tempfile
from fractions import Fraction
from pathlib import Path
from unittest.mock import patch

from src.core.harness import Algorithm, ExperimentSpec
from src.core.problems import ProblemInstance
from src.core.storage import HOME_ENV, ResultStorage


class TestResultStorage:
  """Test cases for ResultStorage."""

  def setup_method(self):
    """Set up test environment."""
    self.temp_dir = tempfile.mkdtemp()
    self.storage = ResultStorage(self.temp_dir)

  def teardown_method(self):
    """Clean up test environment."""
    if os.path.exists(self.temp_dir):
      shutil.rmtree(self.temp_dir)

  def test_init_default_path(self):
    """Test the default home directory."""
    with patch.dict(os.environ, {}, clear=False):
      os.environ.pop(HOME_ENV, None)
      storage = ResultStorage()
    assert storage.base_path == Path.home() / ".gomea-trap"

  def test_init_from_environment(self):
    """Test that the environment variable overrides the default."""
    with patch.dict(os.environ, {HOME_ENV: self.temp_dir}):
      storage = ResultStorage()
    assert storage.base_path == Path(self.temp_dir)

  def test_get_directories(self):
    """Test directory path getters."""
    base = Path(self.temp_dir)

    assert self.storage.get_home_dir() == base
    assert self.storage.get_runs_dir() == base / "runs"
    assert self.storage.get_sweeps_dir() == base / "sweeps"
    assert self.storage.get_sweep_dir("fig4") == base / "sweeps" / "fig4"

  def test_experiment_file_name_standard(self):
    """Test file names of standard-trap specs."""
    spec = ExperimentSpec.build(
      ProblemInstance.standard(6, 4), Algorithm.GOMEA, base_seed=3
    )
    name = self.storage.experiment_file_name(spec)
    assert name == "gomea_standard_m6_k4_mu96_uniform_seed3.csv"
    assert self.storage.get_run_path(spec) == Path(self.temp_dir) / "runs" / name

  def test_experiment_file_name_fractional(self):
    """Test that fractional trap parameters give safe file names."""
    inst = ProblemInstance.generalized(2, 3, Fraction(1, 2), 3, 1)
    spec = ExperimentSpec.build(inst, Algorithm.GA, mu=4, budget=100)
    name = self.storage.experiment_file_name(spec)
    assert name == "ga_generalized_m2_k3_a1_2_b3_z1_mu4_uniform_seed0.csv"
    assert "/" not in name

  def test_ensure_directories(self):
    """Test directory creation."""
    nested = ResultStorage(os.path.join(self.temp_dir, "a", "b"))
    nested.ensure_directories()

    assert nested.get_home_dir().is_dir()
    assert nested.get_runs_dir().is_dir()
    assert nested.get_sweeps_dir().is_dir()

  def test_validate_directory_permissions(self):
    """Test directory permission validation."""
    assert self.storage.validate_directory_permissions()
