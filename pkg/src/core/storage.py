"""Storage layout for experiment results."""

import os
from pathlib import Path
from typing import Optional

from .harness import ExperimentSpec

HOME_ENV = "GOMEA_TRAP_HOME"


class ResultStorage:
  """Manages the directory tree that experiment and sweep CSVs are written to."""

  def __init__(self, base_path: Optional[str] = None):
    """Initialize result storage.

    Args:
        base_path: Base directory path. Defaults to $GOMEA_TRAP_HOME, then
            ~/.gomea-trap
    """
    if base_path is None:
      base_path = os.environ.get(HOME_ENV) or os.path.expanduser("~/.gomea-trap")
    self.base_path = Path(base_path)

  def get_home_dir(self) -> Path:
    return self.base_path

  def get_runs_dir(self) -> Path:
    """Directory for single-experiment CSVs."""
    return self.base_path / "runs"

  def get_sweeps_dir(self) -> Path:
    """Directory holding one subdirectory per sweep preset."""
    return self.base_path / "sweeps"

  def get_sweep_dir(self, preset: str) -> Path:
    return self.get_sweeps_dir() / preset

  def experiment_file_name(self, spec: ExperimentSpec) -> str:
    """Stable file name derived from the fields that identify a spec.

    Trap parameters containing ``/`` are written with ``_`` instead.
    """
    inst = spec.instance
    parts = [str(spec.algorithm), str(inst.shape), f"m{inst.m}", f"k{inst.k}"]
    if not inst.params.is_standard:
      p = inst.params
      parts += [f"a{p.a}", f"b{p.b}", f"z{p.z}"]
    parts += [f"mu{spec.mu}", str(spec.init), f"seed{spec.base_seed}"]
    return "_".join(parts).replace("/", "_") + ".csv"

  def get_run_path(self, spec: ExperimentSpec) -> Path:
    return self.get_runs_dir() / self.experiment_file_name(spec)

  def ensure_directories(self) -> None:
    """Create storage directory structure if it doesn't exist."""
    for directory in (self.get_home_dir(), self.get_runs_dir(), self.get_sweeps_dir()):
      directory.mkdir(parents=True, exist_ok=True)

  def validate_directory_permissions(self) -> bool:
    """Validate that directories have proper permissions."""
    self.ensure_directories()

    for directory in (self.get_home_dir(), self.get_runs_dir(), self.get_sweeps_dir()):
      if not directory.exists():
        return False
      if not os.access(directory, os.R_OK | os.W_OK | os.X_OK):
        return False

    return True
