"""Bitstring genomes and seeded random streams.

Genomes are immutable values backed by read-only ``uint8`` numpy arrays, so
every variation operator builds a new string instead of editing a shared one.
All stochastic code draws from a ``RandomStream``, a thin wrapper over numpy's
PCG64 generator that makes the seed explicit and derivable per replication.
"""

from collections.abc import Iterable, Iterator
from typing import Any

import numpy as np
from numpy.typing import NDArray

from ..utils.validation import (
  MAX_SEED,
  validate_positive_int,
  validate_probability,
  validate_seed,
)

Bits = NDArray[np.uint8]

RNG_ID = f"numpy-PCG64/{np.__version__}"


class BitStringError(ValueError):
  """Raised for malformed bitstrings or mismatched lengths."""

  pass


class BitString:
  """Fixed-length binary string with value semantics."""

  __slots__ = ("_bits",)

  _bits: Bits

  def __init__(self, bits: Iterable[int] | NDArray[Any]):
    raw = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
    if raw.ndim != 1 or raw.size == 0:
      raise BitStringError("bitstring must be a non-empty one-dimensional sequence")
    if not np.isin(raw, (0, 1)).all():
      raise BitStringError("every position of a bitstring must hold 0 or 1")
    arr = raw.astype(np.uint8, copy=True)
    arr.flags.writeable = False
    self._bits = arr

  @classmethod
  def _wrap(cls, arr: Bits) -> "BitString":
    """Adopt an already validated array without copying it."""
    obj = cls.__new__(cls)
    arr.flags.writeable = False
    obj._bits = arr
    return obj

  @classmethod
  def from_str(cls, text: str) -> "BitString":
    """Parse a string such as ``"111 011 011"``; spaces are ignored."""
    digits = text.replace(" ", "")
    if not digits or any(ch not in "01" for ch in digits):
      raise BitStringError(f"not a bitstring: {text!r}")
    return cls._wrap(np.frombuffer(digits.encode(), dtype=np.uint8) - ord("0"))

  @classmethod
  def zeros(cls, length: int) -> "BitString":
    validate_positive_int("length", length)
    return cls._wrap(np.zeros(length, dtype=np.uint8))

  @classmethod
  def ones(cls, length: int) -> "BitString":
    validate_positive_int("length", length)
    return cls._wrap(np.ones(length, dtype=np.uint8))

  @property
  def bits(self) -> Bits:
    """Read-only view of the underlying array."""
    return self._bits

  def __len__(self) -> int:
    return int(self._bits.size)

  def __getitem__(self, index: int) -> int:
    return int(self._bits[index])

  def __iter__(self) -> Iterator[int]:
    return (int(b) for b in self._bits)

  def __eq__(self, other: object) -> bool:
    if not isinstance(other, BitString):
      return NotImplemented
    return bool(np.array_equal(self._bits, other._bits))

  def __hash__(self) -> int:
    return hash(self._bits.tobytes())

  def __str__(self) -> str:
    return (self._bits + ord("0")).tobytes().decode()

  def __repr__(self) -> str:
    return f"BitString('{self}')"


def unitation(s: BitString) -> int:
  """Number of 1-bits in ``s``."""
  return int(np.count_nonzero(s.bits))


def complement(s: BitString) -> BitString:
  return BitString._wrap(1 - s.bits)


def _check_blocks(length: int, k: int) -> int:
  validate_positive_int("k", k)
  if length % k != 0:
    raise BitStringError(f"length {length} is not divisible by block length {k}")
  return length // k


def block(s: BitString, i: int, k: int) -> BitString:
  """The ``i``-th block of ``k`` bits, positions ``[i*k, i*k + k)``.

  Raises:
      BitStringError: If the length is not a multiple of k or i is out of range
  """
  m = _check_blocks(len(s), k)
  if not 0 <= i < m:
    raise BitStringError(f"block index {i} out of range [0, {m})")
  return BitString._wrap(s.bits[i * k : i * k + k].copy())


def block_unitations(s: BitString, k: int) -> NDArray[np.int64]:
  """Unitation of every block, as an array of length ``len(s) // k``."""
  _check_blocks(len(s), k)
  return s.bits.reshape(-1, k).sum(axis=1, dtype=np.int64)


def hamming(a: BitString, b: BitString) -> int:
  """Number of positions where ``a`` and ``b`` differ."""
  if len(a) != len(b):
    raise BitStringError(f"length mismatch: {len(a)} != {len(b)}")
  return int(np.count_nonzero(a.bits != b.bits))


class RandomStream:
  """Seeded PCG64 stream; one stream per run, never shared between workers."""

  def __init__(self, seed: int):
    self.seed = validate_seed(seed)
    self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

  def child(self, label: int) -> "RandomStream":
    """Independent stream for ``label`` (seed XOR label, kept to 64 bits)."""
    return RandomStream((self.seed ^ label) & MAX_SEED)

  @property
  def generator(self) -> np.random.Generator:
    return self._gen

  def draw_index(self, n: int) -> int:
    validate_positive_int("n", n)
    return int(self._gen.integers(0, n))

  def flip(self, p: float) -> bool:
    validate_probability("p", p)
    return bool(self._gen.random() < p)

  def integers(self, high: int, size: int) -> NDArray[np.int64]:
    """``size`` independent uniform draws from ``[0, high)``."""
    return self._gen.integers(0, high, size=size)

  def coins(self, size: int, p: float = 0.5) -> NDArray[np.bool_]:
    """Boolean array, each entry true with probability ``p``."""
    return self._gen.random(size) < p

  def permutation(self, n: int) -> NDArray[np.int64]:
    return self._gen.permutation(n)

  def sample(self, n: int, size: int) -> NDArray[np.int64]:
    """``size`` distinct values from ``[0, n)``."""
    return self._gen.choice(n, size=size, replace=False)

  def bits(self, size: int) -> Bits:
    return self._gen.integers(0, 2, size=size, dtype=np.uint8)


def draw_index(r: RandomStream, n: int) -> int:
  """Uniform integer in ``[0, n)``; advances the stream."""
  return r.draw_index(n)


def flip_with_probability(r: RandomStream, p: float) -> bool:
  """True with probability ``p``; ``p`` must lie in [0, 1]."""
  return r.flip(p)
