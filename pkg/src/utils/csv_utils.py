"""Self-describing CSV output for experiments, sweeps and bounds.

An experiment CSV starts with ``# key=value`` lines echoing every setting that
determines the runs, followed by one row per replication and a final summary
row. Reals are written with 12 significant digits.
"""

import csv
from collections.abc import Iterable
from typing import TextIO

from ..core.bitstring import RNG_ID
from ..core.bounds import BoundReport
from ..core.harness import ExperimentResult, RunRecord, SummaryRow
from ..evotype import BoundRow, RunRow, SummaryPayload

RUN_COLUMNS = ["rep", "seed", "hit", "hitting_time", "evaluations_used"]
SUMMARY_COLUMNS = [
  "successes",
  "censored",
  "success_rate",
  "mean_hitting_time",
  "std_hitting_time",
  "total_evaluations",
  "bound_value",
  "bound_dominant",
]
SWEEP_COLUMNS = [
  "shape",
  "m",
  "k",
  "a",
  "b",
  "z",
  "algorithm",
  "mu",
  "c",
  "init",
  "budget",
  "replications",
  "base_seed",
  *SUMMARY_COLUMNS,
]
BOUND_COLUMNS = ["formula_name", "params", "value"]


def format_real(x: float | None) -> str:
  """12 significant digits; empty for a missing value."""
  return "" if x is None else f"{x:.12g}"


def run_row(rec: RunRecord) -> RunRow:
  return {
    "rep": rec.rep,
    "seed": rec.seed,
    "hit": rec.hit,
    "hitting_time": rec.hitting_time,
    "evaluations_used": rec.evaluations_used,
  }


def summary_payload(row: SummaryRow) -> SummaryPayload:
  return {
    "successes": row.successes,
    "censored": row.censored,
    "success_rate": row.success_rate,
    "mean_hitting_time": row.mean_hitting_time,
    "std_hitting_time": row.std_hitting_time,
    "total_evaluations": row.total_evaluations,
    "bound_value": row.bound_value,
    "bound_dominant": row.bound_dominant,
  }


def _summary_cells(row: SummaryRow) -> list[str]:
  return [
    str(row.successes),
    str(row.censored),
    format_real(row.success_rate),
    format_real(row.mean_hitting_time),
    format_real(row.std_hitting_time),
    str(row.total_evaluations),
    format_real(row.bound_value),
    format_real(row.bound_dominant),
  ]


def write_experiment_csv(result: ExperimentResult, stream: TextIO) -> None:
  """Write header, per-run rows and the summary row of one experiment."""
  for key, value in result.summary.spec.echo().items():
    stream.write(f"# {key}={value}\n")
  writer = csv.writer(stream, lineterminator="\n")
  writer.writerow(RUN_COLUMNS)
  for rec in result.records:
    writer.writerow(
      [
        rec.rep,
        rec.seed,
        int(rec.hit),
        "" if rec.hitting_time is None else rec.hitting_time,
        rec.evaluations_used,
      ]
    )
  stream.write(f"# summary: {','.join(SUMMARY_COLUMNS)}\n")
  writer.writerow(["summary", *_summary_cells(result.summary)])


def read_header(text: str) -> dict[str, str]:
  """``key=value`` pairs from the leading comment lines of a CSV."""
  fields: dict[str, str] = {}
  for line in text.splitlines():
    if not line.startswith("#"):
      break
    key, sep, value = line[1:].strip().partition("=")
    if sep:
      fields[key.strip()] = value.strip()
  return fields


def read_experiment_csv(text: str) -> tuple[dict[str, str], list[RunRow]]:
  """Header fields and run rows of an experiment CSV.

  Raises:
      ValueError: If the run table is missing or malformed
  """
  header = read_header(text)
  body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
  rows = list(csv.reader(body))
  if not rows or rows[0] != RUN_COLUMNS:
    raise ValueError("experiment CSV has no run table")
  runs: list[RunRow] = []
  for cells in rows[1:]:
    if cells[0] == "summary":
      continue
    rep, seed, hit, time, used = cells
    runs.append(
      {
        "rep": int(rep),
        "seed": int(seed),
        "hit": hit == "1",
        "hitting_time": int(time) if time else None,
        "evaluations_used": int(used),
      }
    )
  return header, runs


def write_sweep_csv(
  preset: str, results: Iterable[ExperimentResult], stream: TextIO
) -> None:
  """One summary row per grid point, with the point's parameters."""
  stream.write(f"# preset={preset}\n")
  stream.write(f"# rng_id={RNG_ID}\n")
  writer = csv.writer(stream, lineterminator="\n")
  writer.writerow(SWEEP_COLUMNS)
  for result in results:
    echo = result.summary.spec.echo()
    writer.writerow(
      [echo[col] for col in SWEEP_COLUMNS[:13]] + _summary_cells(result.summary)
    )


def bound_row(report: BoundReport) -> BoundRow:
  return {
    "formula_name": report.formula_name,
    "params": report.params_text(),
    "value": report.value,
  }


def write_bound_csv(reports: Iterable[BoundReport], stream: TextIO) -> None:
  writer = csv.writer(stream, lineterminator="\n")
  writer.writerow(BOUND_COLUMNS)
  for report in reports:
    writer.writerow(
      [report.formula_name, report.params_text(), format_real(report.value)]
    )
