"""MCP Tool for listing the sweep presets."""

import json
import logging
from typing import Any, Dict

from mcp.types import TextContent, Tool

from ..core.presets import PRESETS
from ..evotype import ListPresetsResult

logger = logging.getLogger(__name__)


async def list_presets() -> ListPresetsResult:
  return {
    "status": "success",
    "presets": [
      {
        "name": preset.name,
        "description": preset.description,
        "points": len(preset.points),
        "replications": preset.replications,
      }
      for preset in PRESETS.values()
    ],
  }


LIST_PRESETS_TOOL = Tool(
  name="list_presets",
  description="List the experiment sweep presets with their grid sizes",
  inputSchema={"type": "object", "properties": {}, "required": []},
)


async def handle_list_presets(arguments: Dict[str, Any]) -> list[TextContent]:
  """Handle list_presets MCP tool call."""
  try:
    result = await list_presets()
    return [
      TextContent(type="text", text=json.dumps(result, indent=2, ensure_ascii=False))
    ]

  except Exception as e:
    logger.error(f"Error in handle_list_presets: {e}")
    error_result: Dict[str, Any] = {
      "status": "internal_error",
      "message": str(e),
      "presets": [],
    }
    return [
      TextContent(
        type="text", text=json.dumps(error_result, indent=2, ensure_ascii=False)
      )
    ]
