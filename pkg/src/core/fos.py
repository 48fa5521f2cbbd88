"""Family-of-subsets linkage models.

A FOS is an ordered tuple of index sets over genome positions. GOM walks it in
a fresh random order on every call; the FOS itself keeps construction order so
two models built the same way compare equal.
"""

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ..utils.validation import validate_positive_int
from .problems import ProblemInstance


class FOSError(ValueError):
  """Raised for malformed linkage models."""

  pass


@dataclass(frozen=True)
class FOS:
  """Ordered subsets of ``[0, genome_length)``; no subset is empty."""

  subsets: tuple[frozenset[int], ...]
  genome_length: int

  def __post_init__(self) -> None:
    validate_positive_int("genome_length", self.genome_length)
    subsets = tuple(frozenset(s) for s in self.subsets)
    for i, subset in enumerate(subsets):
      if not subset:
        raise FOSError(f"FOS subset {i} is empty")
      bad = [j for j in subset if not 0 <= j < self.genome_length]
      if bad:
        raise FOSError(
          f"FOS subset {i} has indices outside [0, {self.genome_length}): {sorted(bad)}"
        )
    object.__setattr__(self, "subsets", subsets)

  @classmethod
  def of(cls, subsets: Iterable[Iterable[int]], genome_length: int) -> "FOS":
    return cls(tuple(frozenset(s) for s in subsets), genome_length)

  def __len__(self) -> int:
    return len(self.subsets)

  def __iter__(self) -> Iterator[frozenset[int]]:
    return iter(self.subsets)

  def masks(self) -> list[NDArray[np.intp]]:
    """Sorted index arrays, one per subset, ready for fancy indexing."""
    return [np.array(sorted(s), dtype=np.intp) for s in self.subsets]


def truthful_mp_fos(m: int, k: int) -> FOS:
  """One subset per block: ``{i*k, ..., i*k + k - 1}`` for ``i`` in ``[0, m)``."""
  validate_positive_int("m", m)
  validate_positive_int("k", k)
  return FOS.of((range(i * k, i * k + k) for i in range(m)), m * k)


def univariate_fos(length: int) -> FOS:
  """One singleton subset per position."""
  validate_positive_int("length", length)
  return FOS.of(([i] for i in range(length)), length)


def is_marginal_product(f: FOS) -> bool:
  """True iff the subsets are pairwise disjoint."""
  seen: set[int] = set()
  for subset in f.subsets:
    if seen & subset:
      return False
    seen |= subset
  return True


def is_truthful(f: FOS, inst: ProblemInstance) -> bool:
  """True iff every subset lies inside a single block of ``inst``.

  Raises:
      FOSError: If the FOS does not cover a genome of length m*k
  """
  if f.genome_length != inst.length:
    raise FOSError(
      f"FOS genome length {f.genome_length} does not match m*k = {inst.length}"
    )
  return all(len({j // inst.k for j in subset}) == 1 for subset in f.subsets)


def fos_from_text(text: str, genome_length: int) -> FOS:
  """Parse the textual format: one subset per line, comma-separated indices.

  Blank lines and lines starting with ``#`` are skipped.

  Raises:
      FOSError: If a line does not parse or an index is out of range
  """
  subsets: list[list[int]] = []
  for lineno, raw in enumerate(text.splitlines(), start=1):
    line = raw.strip()
    if not line or line.startswith("#"):
      continue
    try:
      subsets.append([int(tok) for tok in line.split(",") if tok.strip()])
    except ValueError:
      raise FOSError(f"line {lineno}: expected comma-separated integers, got {raw!r}")
  if not subsets:
    raise FOSError("FOS description contains no subsets")
  return FOS.of(subsets, genome_length)


def fos_to_text(f: FOS) -> str:
  return "".join(",".join(str(j) for j in sorted(s)) + "\n" for s in f.subsets)


def load_fos(path: Path, genome_length: int) -> FOS:
  """Read a FOS file written in the textual format."""
  try:
    text = path.read_text(encoding="utf-8")
  except OSError as e:
    raise FOSError(f"cannot read FOS file {path}: {e}")
  return fos_from_text(text, genome_length)
