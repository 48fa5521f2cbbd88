"""Core type definitions for gomea-trap-lab payloads."""

from typing import TypedDict


class RunRow(TypedDict):
  """One replication as written to CSV and returned by the MCP tool"""

  rep: int
  seed: int
  hit: bool
  hitting_time: int | None  # None when the budget ran out first
  evaluations_used: int


class SummaryPayload(TypedDict):
  """Aggregate over the replications of one experiment"""

  successes: int
  censored: int  # Runs that used up their budget
  success_rate: float
  mean_hitting_time: float | None  # Over successful runs only
  std_hitting_time: float | None  # Sample deviation, 0 with one success
  total_evaluations: int
  bound_value: float | None
  bound_dominant: float | None  # Only for the optimal-region bound


class BoundRow(TypedDict):
  """One evaluated formula"""

  formula_name: str
  params: str  # "key=value;key=value"
  value: float


class ComputeBoundResult(TypedDict, total=False):
  """compute_bound MCP tool response"""

  status: str  # "success" or error code
  formula: str
  bounds: list[BoundRow]  # On success
  message: str  # Error message (on error only)


class RunExperimentResult(TypedDict, total=False):
  """run_experiment MCP tool response"""

  status: str  # "success" or error code
  config: dict[str, str]  # Echoed experiment header
  summary: SummaryPayload
  runs: list[RunRow]  # Only when include_runs is set
  csv_path: str  # Where the CSV was written
  message: str  # Error message (on error only)


class PresetInfo(TypedDict):
  """One sweep preset"""

  name: str
  description: str
  points: int  # Grid size
  replications: int  # Default runs per point


class ListPresetsResult(TypedDict):
  """list_presets MCP tool response"""

  status: str
  presets: list[PresetInfo]
