"""MCP tools module for gomea-trap-lab."""
