"""gomea-trap-lab payload type definitions."""

from .core_types import (
  RunRow,
  SummaryPayload,
  BoundRow,
  ComputeBoundResult,
  RunExperimentResult,
  PresetInfo,
  ListPresetsResult,
)

__all__ = [
  "RunRow",
  "SummaryPayload",
  "BoundRow",
  "ComputeBoundResult",
  "RunExperimentResult",
  "PresetInfo",
  "ListPresetsResult",
]
