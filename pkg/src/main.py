"""gomea-trap command line: bounds, single experiments, sweeps and the MCP server."""

import argparse
import asyncio
import logging
import os
import sys
from collections.abc import Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, TextIO

from .core.bounds import FORMULAS, ParamValue, evaluate_formula
from .core.fos import load_fos
from .core.harness import (
  Algorithm,
  BudgetPreset,
  ExperimentSpec,
  Init,
  run_experiment,
)
from .core.presets import PRESETS, get_preset, run_sweep, sweep_specs
from .core.problems import ProblemInstance, Shape
from .core.storage import ResultStorage
from .utils.config_utils import config_to_argv, load_config, log_level_from_env
from .utils.csv_utils import write_bound_csv, write_experiment_csv, write_sweep_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

_SWITCHES = {"verbose", "mutation", "seeded_optimum", "no_progress", "save_runs"}
_EXCLUSIVE = (("mu", "c"), ("budget", "budget_preset"))


class UsageError(ValueError):
  """Raised for command line usage errors."""

  pass


class _Parser(argparse.ArgumentParser):
  def error(self, message: str):  # type: ignore[override]
    raise UsageError(message)


def _int_list(text: str) -> list[int]:
  try:
    return [int(tok) for tok in text.split(",") if tok.strip()]
  except ValueError:
    raise argparse.ArgumentTypeError(
      f"expected comma-separated integers, got {text!r}"
    )


def _add_common(p: argparse.ArgumentParser) -> None:
  p.add_argument("--config", type=Path, help="key=value file; flags override it")
  p.add_argument("--verbose", action="store_true", help="debug logging")
  p.add_argument("--out", type=Path, help="output CSV path (default stdout)")


def _add_problem(p: argparse.ArgumentParser) -> None:
  p.add_argument("--shape", choices=[str(s) for s in Shape])
  p.add_argument("--m", type=int, help="number of blocks")
  p.add_argument("--k", type=int, help="block length")
  p.add_argument("--a", help="local optimum value (generalized, tailed)")
  p.add_argument("--b", help="global optimum value (generalized, tailed)")
  p.add_argument("--z", type=int, help="slope change point (generalized, tailed)")


def build_parser() -> argparse.ArgumentParser:
  parser = _Parser(
    prog="gomea-trap",
    description="GOMEA, (1+1) EA and (mu+1) GA on concatenated trap functions",
  )
  sub = parser.add_subparsers(dest="command", required=True)

  bound = sub.add_parser("bound", help="evaluate a runtime bound formula")
  bound.add_argument("formula", choices=list(FORMULAS))
  _add_common(bound)
  _add_problem(bound)
  bound.add_argument("--c", help="population constant")
  bound.add_argument("--s", type=int, help="non-optimal blocks (ea-drift)")
  bound.add_argument("--t", help="GOM steps (logistic)")
  bound.add_argument("--mu", type=int, help="population size")
  bound.add_argument("--best-u", type=int, help="best unitation (level)")
  bound.add_argument("--mutation", action="store_true", help="logistic with mutation")

  run = sub.add_parser("run", help="run one replicated experiment")
  _add_common(run)
  _add_problem(run)
  run.add_argument("--alg", default="gomea", help="gomea, gomea-mut, ea or ga")
  run.add_argument("--mu", type=int, help="population size")
  run.add_argument("--c", help="population constant; derives mu")
  run.add_argument("--init", default="uniform", help=", ".join(str(i) for i in Init))
  run.add_argument("--budget", type=int, help="evaluation budget")
  run.add_argument("--budget-preset", choices=[str(p) for p in BudgetPreset])
  run.add_argument("--reps", type=int, default=1, help="replications")
  run.add_argument("--seed", type=int, default=0, help="base seed")
  run.add_argument("--fos-file", type=Path, help="linkage model file")
  run.add_argument("--ea-rate", type=float, help="(1+1) EA mutation rate")
  run.add_argument("--ga-mutation-rate", type=float, default=0.0)
  run.add_argument("--seeded-optimum", action="store_true")
  run.add_argument("--threads", type=int, default=os.cpu_count() or 1)

  sweep = sub.add_parser("sweep", help="run a preset experiment grid")
  sweep.add_argument("preset", choices=list(PRESETS))
  _add_common(sweep)
  sweep.add_argument("--reps", type=int, help="replications per point")
  sweep.add_argument("--seed", type=int, default=0, help="base seed")
  sweep.add_argument("--only-k", type=_int_list, help="keep these k, e.g. 4,5")
  sweep.add_argument("--only-m", type=_int_list, help="keep these m")
  sweep.add_argument("--only-alg", help="keep these algorithms, e.g. gomea,ga")
  sweep.add_argument("--threads", type=int, default=os.cpu_count() or 1)
  sweep.add_argument("--save-runs", action="store_true", help="per-point CSVs too")
  sweep.add_argument("--out-dir", type=Path, help="results directory")
  sweep.add_argument("--no-progress", action="store_true")

  serve = sub.add_parser("serve", help="run the MCP server on stdio")
  serve.add_argument("--config", type=Path, help=argparse.SUPPRESS)
  serve.add_argument("--verbose", action="store_true", help="debug logging")
  return parser


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
  """Parse arguments, merging in the ``--config`` file if one is named.

  File values are inserted right after the subcommand so that explicit flags,
  which come later, win. A flag also displaces the file's value for the other
  member of its mutually exclusive pair (``mu``/``c``, ``budget``/``budget_preset``).
  """
  argv = list(argv)
  pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
  pre.add_argument("--config", type=Path)
  known, _ = pre.parse_known_args(argv)
  if known.config is not None and argv:
    values = load_config(known.config)
    explicit = _explicit_keys(argv[1:])
    for first, second in _EXCLUSIVE:
      if first in explicit:
        values.pop(second, None)
      if second in explicit:
        values.pop(first, None)
    from_file = config_to_argv(values, _SWITCHES)
    argv = [argv[0], *from_file, *argv[1:]]
  return build_parser().parse_args(argv)


def _explicit_keys(argv: Sequence[str]) -> set[str]:
  """Config-style keys of the long flags present in ``argv``."""
  return {
    tok[2:].partition("=")[0].replace("-", "_")
    for tok in argv
    if tok.startswith("--") and len(tok) > 2
  }


@contextmanager
def _output(path: Path | None) -> Iterator[TextIO]:
  if path is None:
    yield sys.stdout
    return
  with path.open("w", encoding="utf-8", newline="") as f:
    yield f
  logger.info(f"wrote {path}")


def _instance(args: argparse.Namespace) -> ProblemInstance:
  if args.m is None or args.k is None:
    raise UsageError("--m and --k are required")
  fields = {"m": str(args.m), "k": str(args.k)}
  for key in ("a", "b", "z"):
    if getattr(args, key) is not None:
      fields[key] = str(getattr(args, key))
  shape = args.shape or ("generalized" if len(fields) > 2 else "standard")
  fields["shape"] = shape
  return ProblemInstance.from_fields(fields)


def cmd_bound(args: argparse.Namespace) -> int:
  params: dict[str, ParamValue] = {
    "m": args.m,
    "k": args.k,
    "a": args.a,
    "b": args.b,
    "z": args.z,
    "c": args.c,
    "s": args.s,
    "t": args.t,
    "mu": args.mu,
    "best_u": args.best_u,
    "shape": args.shape,
    "mutation": args.mutation,
  }
  reports = evaluate_formula(args.formula, params)
  with _output(args.out) as out:
    write_bound_csv(reports, out)
  return EXIT_OK


def build_run_spec(args: argparse.Namespace) -> ExperimentSpec:
  """Experiment spec from ``run`` flags."""
  if args.mu is not None and args.c is not None:
    raise UsageError("--mu and --c are mutually exclusive")
  if args.budget is not None and args.budget_preset is not None:
    raise UsageError("--budget and --budget-preset are mutually exclusive")
  instance = _instance(args)
  fos = load_fos(args.fos_file, instance.length) if args.fos_file else None
  return ExperimentSpec.build(
    instance,
    Algorithm.parse(args.alg),
    mu=args.mu,
    c=args.c,
    init=Init.parse(args.init),
    budget=args.budget,
    budget_preset=BudgetPreset(args.budget_preset) if args.budget_preset else None,
    replications=args.reps,
    base_seed=args.seed,
    fos=fos,
    ea_rate=args.ea_rate,
    ga_mutation_rate=args.ga_mutation_rate,
    seeded_optimum=args.seeded_optimum,
  )


def cmd_run(args: argparse.Namespace) -> int:
  spec = build_run_spec(args)
  result = run_experiment(spec, workers=args.threads)
  with _output(args.out) as out:
    write_experiment_csv(result, out)
  return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
  preset = get_preset(args.preset)
  algorithms = (
    [Algorithm.parse(tok) for tok in args.only_alg.split(",") if tok.strip()]
    if args.only_alg
    else None
  )
  specs = sweep_specs(
    preset,
    replications=args.reps,
    base_seed=args.seed,
    ks=args.only_k,
    ms=args.only_m,
    algorithms=algorithms,
  )
  if not specs:
    raise UsageError(f"the filters leave no points of preset {preset.name}")
  storage: ResultStorage | None = None
  if args.save_runs or args.out_dir is not None:
    storage = ResultStorage(str(args.out_dir) if args.out_dir else None)
    if not storage.validate_directory_permissions():
      home = storage.get_home_dir()
      raise PermissionError(f"results directory {home} is not writable")
  results = run_sweep(specs, workers=args.threads, progress=not args.no_progress)
  with _output(args.out) as out:
    write_sweep_csv(preset.name, results, out)
  if storage is not None:
    directory = storage.get_sweep_dir(preset.name)
    directory.mkdir(parents=True, exist_ok=True)
    for result in results:
      path = directory / storage.experiment_file_name(result.summary.spec)
      with path.open("w", encoding="utf-8", newline="") as f:
        write_experiment_csv(result, f)
    logger.info(f"wrote {len(results)} experiment files to {directory}")
  return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
  from .server import serve

  try:
    asyncio.run(serve())
  except KeyboardInterrupt:
    logger.info("Server stopped by user")
  return EXIT_OK


_COMMANDS = {
  "bound": cmd_bound,
  "run": cmd_run,
  "sweep": cmd_sweep,
  "serve": cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
  """Entry point; returns the process exit code."""
  argv = sys.argv[1:] if argv is None else argv
  try:
    args = parse_args(argv)
  except ValueError as e:
    print(f"error: usage: {e}", file=sys.stderr)
    return EXIT_USAGE

  level = logging.DEBUG if args.verbose else log_level_from_env()
  logging.basicConfig(
    level=level,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
  )
  try:
    return _COMMANDS[args.command](args)
  except UsageError as e:
    print(f"error: usage: {e}", file=sys.stderr)
    return EXIT_USAGE
  except ValueError as e:
    print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
    return EXIT_USAGE
  except Exception as e:
    logger.debug("runtime failure", exc_info=True)
    print(f"error: runtime: {e}", file=sys.stderr)
    return EXIT_RUNTIME


if __name__ == "__main__":
  sys.exit(main())
