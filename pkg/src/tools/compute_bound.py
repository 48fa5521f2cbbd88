"""MCP Tool for evaluating runtime bounds and related closed forms."""

import json
import logging
from typing import Any, Dict

from mcp.types import TextContent, Tool

from ..core.bounds import FORMULAS, evaluate_formula
from ..evotype import ComputeBoundResult
from ..utils.csv_utils import bound_row

logger = logging.getLogger(__name__)

_PARAM_NAMES = ("m", "k", "a", "b", "z", "c", "s", "t", "mu", "best_u", "shape")


async def compute_bound(formula: str, params: Dict[str, Any]) -> ComputeBoundResult:
  """Evaluate one registered formula.

  Args:
    formula: Formula id, e.g. "gomea" or "thm3"
    params: Named inputs; numbers may be given as strings such as "1/2"

  Returns:
    Payload with status and one row per value the formula produces
  """
  try:
    reports = evaluate_formula(formula, params)
  except ValueError as e:
    logger.info(f"compute_bound rejected {formula}: {e}")
    return {"status": "invalid_arguments", "formula": formula, "message": str(e)}
  return {
    "status": "success",
    "formula": formula,
    "bounds": [bound_row(report) for report in reports],
  }


COMPUTE_BOUND_TOOL = Tool(
  name="compute_bound",
  description=(
    "Evaluate a runtime bound or model value for GOMEA, the (1+1) EA or the "
    "population sizing results on concatenated traps"
  ),
  inputSchema={
    "type": "object",
    "properties": {
      "formula": {
        "type": "string",
        "enum": list(FORMULAS),
        "description": "Formula id",
      },
      "m": {"type": "integer", "minimum": 1, "description": "Number of blocks"},
      "k": {"type": "integer", "minimum": 1, "description": "Block length"},
      "a": {"type": "string", "description": "Local optimum value, e.g. '1'"},
      "b": {"type": "string", "description": "Global optimum value, e.g. '6'"},
      "z": {"type": "integer", "minimum": 0, "description": "Slope change point"},
      "c": {"type": "string", "description": "Population constant, e.g. '1/2'"},
      "s": {"type": "integer", "minimum": 1, "description": "Non-optimal blocks"},
      "t": {"type": "number", "minimum": 0, "description": "GOM steps"},
      "mu": {"type": "integer", "minimum": 1, "description": "Population size"},
      "best_u": {"type": "integer", "minimum": 0, "description": "Best unitation"},
      "mutation": {"type": "boolean", "description": "Logistic curve with mutation"},
      "shape": {
        "type": "string",
        "enum": ["standard", "generalized", "tailed"],
        "description": "Trap shape; inferred from a, b, z when omitted",
      },
    },
    "required": ["formula"],
  },
)


async def handle_compute_bound(arguments: Dict[str, Any]) -> list[TextContent]:
  """Handle compute_bound MCP tool call."""
  try:
    params = {name: arguments.get(name) for name in _PARAM_NAMES}
    params["mutation"] = arguments.get("mutation", False)
    result = await compute_bound(str(arguments.get("formula", "")), params)
    return [
      TextContent(type="text", text=json.dumps(result, indent=2, ensure_ascii=False))
    ]

  except Exception as e:
    logger.error(f"Error in handle_compute_bound: {e}")
    error_result: Dict[str, Any] = {"status": "internal_error", "message": str(e)}
    return [
      TextContent(
        type="text", text=json.dumps(error_result, indent=2, ensure_ascii=False)
      )
    ]
