"""gomea-trap MCP server: bounds, experiments and sweep presets over stdio."""

import logging
from typing import Any

from mcp.server import Server
from mcp.server.models import InitializationOptions
from mcp.types import ServerCapabilities
import mcp.server.stdio
import mcp.types as types

from .tools.compute_bound import COMPUTE_BOUND_TOOL, handle_compute_bound
from .tools.list_presets import LIST_PRESETS_TOOL, handle_list_presets
from .tools.run_experiment import RUN_EXPERIMENT_TOOL, handle_run_experiment

logger = logging.getLogger(__name__)

SERVER_NAME = "gomea-trap"


def create_server() -> Server:
  """Create and configure the MCP server."""
  server = Server(SERVER_NAME)

  @server.list_tools()
  async def handle_list_tools() -> list[types.Tool]:  # type: ignore[misc]
    """List available tools."""
    return [COMPUTE_BOUND_TOOL, RUN_EXPERIMENT_TOOL, LIST_PRESETS_TOOL]

  @server.call_tool()
  async def handle_call_tool(  # type: ignore[misc]
    name: str, arguments: dict[str, Any] | None
  ) -> list[types.TextContent]:
    """Handle tool calls."""
    if name == "compute_bound":
      return await handle_compute_bound(arguments or {})
    elif name == "run_experiment":
      return await handle_run_experiment(arguments or {})
    elif name == "list_presets":
      return await handle_list_presets(arguments or {})
    else:
      raise ValueError(f"Unknown tool: {name}")

  return server


async def serve() -> None:
  """Run the server on stdin/stdout until the client disconnects."""
  logger.info("Starting gomea-trap MCP server...")
  server = create_server()

  options = InitializationOptions(
    server_name=SERVER_NAME,
    server_version="0.1.0",
    capabilities=ServerCapabilities(tools={}),  # type: ignore
    instructions="""Use gomea-trap when studying how GOMEA and simple evolutionary \
algorithms behave on concatenated trap functions:

1. `compute_bound` evaluates runtime bounds and population sizes (formula ids: \
ea, ea-drift, gomea, lemma1, lemma2, pstar, thm3, logistic, level, takeover).
2. `run_experiment` runs seeded replications and reports the success rate and \
hitting-time statistics; keep m and k small, runs are CPU bound.
3. `list_presets` shows the sweep grids that the command line can run in full.""",
  )

  async with mcp.server.stdio.stdio_server() as (read_stream, write_stream):
    await server.run(read_stream, write_stream, options)
