"""MCP Tool for running a replicated experiment."""

import asyncio
import json
import logging
from typing import Any, Dict, Optional

from mcp.types import TextContent, Tool

from ..core.harness import (
  Algorithm,
  BudgetPreset,
  ExperimentSpec,
  Init,
  run_experiment,
)
from ..core.problems import ProblemInstance
from ..core.storage import ResultStorage
from ..evotype import RunExperimentResult
from ..utils.csv_utils import run_row, summary_payload, write_experiment_csv

logger = logging.getLogger(__name__)

MAX_REPLICATIONS = 1000


def build_spec(arguments: Dict[str, Any]) -> ExperimentSpec:
  """Experiment spec from tool arguments.

  Raises:
    ValueError: On missing or invalid arguments
  """
  fields = {
    key: str(arguments[key])
    for key in ("shape", "m", "k", "a", "b", "z")
    if arguments.get(key) is not None
  }
  instance = ProblemInstance.from_fields(fields)
  replications = int(arguments.get("replications", 10))
  if replications > MAX_REPLICATIONS:
    raise ValueError(
      f"replications must be at most {MAX_REPLICATIONS} here, got {replications}"
    )
  preset = arguments.get("budget_preset")
  return ExperimentSpec.build(
    instance,
    Algorithm.parse(str(arguments.get("algorithm", "gomea"))),
    mu=arguments.get("mu"),
    c=arguments.get("c"),
    init=Init.parse(str(arguments.get("init", "uniform"))),
    budget=arguments.get("budget"),
    budget_preset=BudgetPreset(preset) if preset else None,
    replications=replications,
    base_seed=int(arguments.get("seed", 0)),
  )


async def run_experiment_tool(
  arguments: Dict[str, Any],
  include_runs: bool = False,
  save: bool = False,
  storage: Optional[ResultStorage] = None,
) -> RunExperimentResult:
  """Run an experiment off the event loop and summarize it.

  Args:
    arguments: Problem, algorithm and budget settings
    include_runs: Also return every replication
    save: Write the CSV under the results directory
    storage: Results directory manager; defaults to $GOMEA_TRAP_HOME

  Returns:
    Payload with status, echoed configuration and summary
  """
  try:
    spec = build_spec(arguments)
  except (ValueError, TypeError) as e:
    logger.info(f"run_experiment rejected arguments: {e}")
    return {"status": "invalid_arguments", "message": str(e)}

  result = await asyncio.to_thread(run_experiment, spec)
  payload: RunExperimentResult = {
    "status": "success",
    "config": spec.echo(),
    "summary": summary_payload(result.summary),
  }
  if include_runs:
    payload["runs"] = [run_row(rec) for rec in result.records]
  if save:
    storage = storage or ResultStorage()
    storage.ensure_directories()
    path = storage.get_run_path(spec)
    with path.open("w", encoding="utf-8", newline="") as f:
      write_experiment_csv(result, f)
    logger.info(f"wrote {path}")
    payload["csv_path"] = str(path)
  return payload


RUN_EXPERIMENT_TOOL = Tool(
  name="run_experiment",
  description=(
    "Run GOMEA, GOMEA with local mutation, the (1+1) EA or the (mu+1) GA on a "
    "concatenated trap for a number of seeded replications and report the "
    "success rate and hitting-time statistics"
  ),
  inputSchema={
    "type": "object",
    "properties": {
      "shape": {
        "type": "string",
        "enum": ["standard", "generalized", "tailed"],
        "description": "Trap shape (default standard)",
      },
      "m": {"type": "integer", "minimum": 1, "description": "Number of blocks"},
      "k": {"type": "integer", "minimum": 1, "description": "Block length"},
      "a": {"type": "string", "description": "Local optimum value"},
      "b": {"type": "string", "description": "Global optimum value"},
      "z": {"type": "integer", "minimum": 1, "description": "Slope change point"},
      "algorithm": {
        "type": "string",
        "enum": [str(a) for a in Algorithm],
        "description": "Algorithm (default gomea)",
      },
      "mu": {"type": "integer", "minimum": 2, "description": "Population size"},
      "c": {"type": "string", "description": "Population constant, e.g. '1/2'"},
      "init": {
        "type": "string",
        "enum": [str(i) for i in Init],
        "description": "Population initializer (default uniform)",
      },
      "budget": {"type": "integer", "minimum": 1, "description": "Evaluations"},
      "budget_preset": {
        "type": "string",
        "enum": [str(p) for p in BudgetPreset],
        "description": "Named budget formula",
      },
      "replications": {
        "type": "integer",
        "minimum": 1,
        "maximum": MAX_REPLICATIONS,
        "description": "Number of runs (default 10)",
      },
      "seed": {"type": "integer", "minimum": 0, "description": "Base seed"},
      "include_runs": {"type": "boolean", "description": "Return every run"},
      "save": {"type": "boolean", "description": "Write the CSV to disk"},
    },
    "required": ["m", "k"],
  },
)


async def handle_run_experiment(arguments: Dict[str, Any]) -> list[TextContent]:
  """Handle run_experiment MCP tool call."""
  try:
    result = await run_experiment_tool(
      arguments,
      include_runs=bool(arguments.get("include_runs", False)),
      save=bool(arguments.get("save", False)),
    )
    return [
      TextContent(type="text", text=json.dumps(result, indent=2, ensure_ascii=False))
    ]

  except Exception as e:
    logger.error(f"Error in handle_run_experiment: {e}")
    error_result: Dict[str, Any] = {"status": "internal_error", "message": str(e)}
    return [
      TextContent(
        type="text", text=json.dumps(error_result, indent=2, ensure_ascii=False)
      )
    ]
