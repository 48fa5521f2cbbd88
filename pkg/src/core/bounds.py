"""Closed-form runtime bounds, probabilities and model curves.

Powers such as ``(mk)^k`` are formed as exact integers or fractions and only
converted to float at the end, so values keep full double precision for every
``k`` used in practice. A small registry maps formula ids to calculators for
the ``bound`` command and the MCP tool.
"""

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from ..utils.validation import (
  as_fraction,
  validate_nonnegative_int,
  validate_positive_int,
  validate_positive_real,
)
from .problems import Shape, TrapParams, p_star, shape_region_start

ParamValue = str | int | float | Fraction | bool | None


class BoundError(ValueError):
  """Raised for invalid bound parameters."""

  pass


class UnknownFormulaError(BoundError):
  """Raised when a formula id is not in the registry."""

  pass


@dataclass(frozen=True)
class BoundReport:
  """One evaluated formula: name, the inputs it used and its value."""

  formula_name: str
  inputs: dict[str, str] = field(hash=False)
  value: float

  def params_text(self) -> str:
    return ";".join(f"{k}={v}" for k, v in self.inputs.items())


def _to_float(x: Fraction | int, what: str) -> float:
  try:
    return float(x)
  except OverflowError:
    raise BoundError(f"{what} exceeds the double range")


def ea_drift_lower_bound(s: int, m: int, k: int) -> tuple[float, float]:
  """Multiplicative drift of the (1+1) EA with ``s`` non-optimal blocks.

  Returns:
      (exact, floor) where exact is ``s (1/mk)^k (1 - 1/mk)^((m-s)k)`` and
      floor is the simplified ``(s/e) (mk)^-k``
  """
  validate_positive_int("m", m)
  validate_positive_int("k", k)
  if not 1 <= s <= m:
    raise BoundError(f"s must lie in [1, m], got s={s}, m={m}")
  n = m * k
  exact = s * Fraction(1, n) ** k * (1 - Fraction(1, n)) ** ((m - s) * k)
  floor = s / (math.e * _to_float(n**k, "(mk)^k"))
  return float(exact), floor


def ea_upper_bound(m: int, k: int) -> float:
  """Expected (1+1) EA runtime bound ``e (1 + ln m) (mk)^k`` at rate ``1/(mk)``."""
  validate_positive_int("m", m)
  validate_positive_int("k", k)
  return math.e * (1 + math.log(m)) * _to_float((m * k) ** k, "(mk)^k")


def lemma1_population(m: int, k: int, c: float | Fraction) -> int:
  """Population size ``ceil(c m 2^k)`` that holds every optimal block w.h.p."""
  validate_positive_int("m", m)
  validate_positive_int("k", k)
  c = as_fraction("c", validate_positive_real("c", c))
  return math.ceil(c * m * 2**k)


def lemma1_failure(m: int, c: float | Fraction) -> float:
  """Probability bound ``m e^(-cm)`` that some optimal block is missing."""
  validate_positive_int("m", m)
  validate_positive_real("c", c)
  return min(1.0, m * math.exp(-float(c) * m))


def logistic_fraction(t: float, mu: float, with_mutation: bool = False) -> float:
  """Fraction of the population holding a block after ``t`` GOM steps.

  ``1 / (1 + (mu + 1) e^(-t/mu))``; local mutation slows the spread by ``e``.
  """
  if t < 0:
    raise BoundError(f"t must be nonnegative, got {t}")
  if mu < 1:
    raise BoundError(f"mu must be at least 1, got {mu}")
  rate = mu * (math.e if with_mutation else 1.0)
  return 1.0 / (1.0 + (mu + 1) * math.exp(-t / rate))


def takeover_steps(mu: int, m: int) -> int:
  """GOM steps ``mu m`` after which a block has taken over the population."""
  validate_positive_int("mu", mu)
  validate_positive_int("m", m)
  return mu * m


def mutation_no_flip_probability(k: int) -> float:
  """Chance ``(1 - 1/k)^k`` that local mutation at rate ``1/k`` flips nothing."""
  validate_positive_int("k", k)
  return (1 - 1 / k) ** k


def gomea_bound(m: int, k: int, c: float | Fraction) -> float:
  """GOMEA runtime bound ``c m^3 2^k`` evaluations."""
  validate_positive_int("m", m)
  validate_positive_int("k", k)
  return float(as_fraction("c", validate_positive_real("c", c)) * m**3 * 2**k)


def lemma2_population(m: int, pstar: float | Fraction, c: float | Fraction) -> int:
  """Population size ``ceil((c/p*) m)`` that holds every optimal region w.h.p."""
  validate_positive_int("m", m)
  if not 0 < pstar <= 1:
    raise BoundError(f"p* must lie in (0, 1], got {pstar}")
  c = as_fraction("c", validate_positive_real("c", c))
  return math.ceil(c / as_fraction("p*", pstar) * m)


def level_count(p: TrapParams) -> int:
  """Upper bound ``floor((b-a)(k-z)/b)`` on the levels of the hill climb."""
  return math.floor((p.b - p.a) * (p.k - p.z) / p.b)


def level(best_u: int, p: TrapParams, shape: Shape = Shape.GENERALIZED) -> int:
  """Levels climbed inside the optimal region by the best block."""
  if not 0 <= best_u <= p.k:
    raise BoundError(f"best_u must lie in [0, {p.k}], got {best_u}")
  return max(0, best_u - shape_region_start(p, shape))


def level_improve_probability(k: int, c: float | Fraction, pstar: Fraction) -> float:
  """Chance a local mutation lifts a block one level, once spread.

  ``(1/(1 + c/p*)) (1/k) (1 - 1/k)^(k-1)``, at least ``1/(e k (1 + c/p*))``.
  """
  validate_positive_int("k", k)
  spread = 1 / (1 + float(c) / float(pstar))
  return spread * (1 / k) * (1 - 1 / k) ** (k - 1)


def thm3_bound(
  m: int, p: TrapParams, c: float | Fraction, shape: Shape = Shape.GENERALIZED
) -> tuple[float, float]:
  """GOMEA with local mutation on the generalized trap.

  Returns:
      (full, dominant): the full bound
      ``L (m ln m)(e k (1 + c/p*) + (c e / p*) m ln m) + (c/p*) m^3`` with
      ``L = floor((b-a)(k-z)/b)``, and its last term ``(c/p*) m^3``
  """
  if m < 2:
    raise BoundError(f"m must be at least 2, got {m}")
  validate_positive_real("c", c)
  ratio = float(as_fraction("c", c) / p_star(p, shape))
  mlnm = m * math.log(m)
  dominant = ratio * m**3
  climb = level_count(p) * mlnm * (math.e * p.k * (1 + ratio) + math.e * ratio * mlnm)
  return climb + dominant, dominant


# Registry used by the command line and the MCP tool.


def _int(params: Mapping[str, ParamValue], name: str) -> int:
  value = params.get(name)
  if value is None:
    raise BoundError(f"missing parameter '{name}'")
  try:
    return int(value)
  except (TypeError, ValueError):
    raise BoundError(f"parameter '{name}' must be an integer, got {value!r}")


def _frac(params: Mapping[str, ParamValue], name: str) -> Fraction:
  value = params.get(name)
  if value is None or isinstance(value, bool):
    raise BoundError(f"missing parameter '{name}'")
  return as_fraction(name, value)


def _trap(params: Mapping[str, ParamValue]) -> tuple[TrapParams, Shape]:
  """Trap parameters from ``k`` and, unless standard, ``a, b, z``."""
  k = _int(params, "k")
  shape_text = params.get("shape")
  has_abz = any(params.get(x) is not None for x in ("a", "b", "z"))
  if shape_text is None:
    shape = Shape.GENERALIZED if has_abz else Shape.STANDARD
  else:
    shape = Shape(str(shape_text))
  if shape is Shape.STANDARD:
    return TrapParams.standard(k), shape
  return TrapParams(k, _frac(params, "a"), _frac(params, "b"), _int(params, "z")), shape


def _trap_inputs(p: TrapParams, shape: Shape) -> dict[str, str]:
  return {
    "shape": str(shape),
    "k": str(p.k),
    "a": str(p.a),
    "b": str(p.b),
    "z": str(p.z),
  }


def _ea(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  m, k = _int(params, "m"), _int(params, "k")
  inputs = {"m": str(m), "k": str(k)}
  return [BoundReport("ea_upper_bound", inputs, ea_upper_bound(m, k))]


def _ea_drift(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  s, m, k = _int(params, "s"), _int(params, "m"), _int(params, "k")
  exact, floor = ea_drift_lower_bound(s, m, k)
  inputs = {"s": str(s), "m": str(m), "k": str(k)}
  return [
    BoundReport("ea_drift_exact", inputs, exact),
    BoundReport("ea_drift_floor", inputs, floor),
  ]


def _gomea(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  m, k, c = _int(params, "m"), _int(params, "k"), _frac(params, "c")
  inputs = {"m": str(m), "k": str(k), "c": str(c)}
  return [BoundReport("gomea_bound", inputs, gomea_bound(m, k, c))]


def _lemma1(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  m, k, c = _int(params, "m"), _int(params, "k"), _frac(params, "c")
  inputs = {"m": str(m), "k": str(k), "c": str(c)}
  return [
    BoundReport("lemma1_population", inputs, float(lemma1_population(m, k, c))),
    BoundReport("lemma1_failure", inputs, lemma1_failure(m, c)),
  ]


def _pstar(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  p, shape = _trap(params)
  inputs = _trap_inputs(p, shape)
  inputs["region_start"] = str(shape_region_start(p, shape))
  return [BoundReport("p_star", inputs, float(p_star(p, shape)))]


def _lemma2(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  p, shape = _trap(params)
  m, c = _int(params, "m"), _frac(params, "c")
  inputs = {"m": str(m), "c": str(c), **_trap_inputs(p, shape)}
  mu = lemma2_population(m, p_star(p, shape), c)
  return [
    BoundReport("lemma2_population", inputs, float(mu)),
    BoundReport("lemma2_failure", inputs, lemma1_failure(m, c)),
  ]


def _thm3(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  p, shape = _trap(params)
  m, c = _int(params, "m"), _frac(params, "c")
  full, dominant = thm3_bound(m, p, c, shape)
  inputs = {"m": str(m), "c": str(c), **_trap_inputs(p, shape)}
  return [
    BoundReport("thm3_full", inputs, full),
    BoundReport("thm3_dominant", inputs, dominant),
    BoundReport("thm3_levels", inputs, float(level_count(p))),
  ]


def _logistic(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  t = float(_frac(params, "t"))
  mu = _int(params, "mu")
  flag = params.get("mutation")
  if isinstance(flag, str):
    mutation = flag.strip().lower() in ("1", "true", "yes")
  else:
    mutation = bool(flag)
  inputs = {"t": repr(t), "mu": str(mu), "mutation": str(mutation).lower()}
  return [BoundReport("logistic_fraction", inputs, logistic_fraction(t, mu, mutation))]


def _level(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  p, shape = _trap(params)
  best_u = _int(params, "best_u")
  validate_nonnegative_int("best_u", best_u)
  inputs = {"best_u": str(best_u), **_trap_inputs(p, shape)}
  return [BoundReport("level", inputs, float(level(best_u, p, shape)))]


def _takeover(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  mu, m = _int(params, "mu"), _int(params, "m")
  inputs = {"mu": str(mu), "m": str(m)}
  return [BoundReport("takeover_steps", inputs, float(takeover_steps(mu, m)))]


def _no_flip(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  k = _int(params, "k")
  value = mutation_no_flip_probability(k)
  return [BoundReport("mutation_no_flip_probability", {"k": str(k)}, value)]


def _level_improve(params: Mapping[str, ParamValue]) -> list[BoundReport]:
  p, shape = _trap(params)
  c = _frac(params, "c")
  value = level_improve_probability(p.k, c, p_star(p, shape))
  inputs = {"c": str(c), **_trap_inputs(p, shape)}
  return [BoundReport("level_improve_probability", inputs, value)]


FORMULAS: dict[str, Callable[[Mapping[str, ParamValue]], list[BoundReport]]] = {
  "ea": _ea,
  "ea-drift": _ea_drift,
  "gomea": _gomea,
  "lemma1": _lemma1,
  "lemma2": _lemma2,
  "pstar": _pstar,
  "thm3": _thm3,
  "logistic": _logistic,
  "level": _level,
  "takeover": _takeover,
  "no-flip": _no_flip,
  "level-improve": _level_improve,
}


def evaluate_formula(name: str, params: Mapping[str, ParamValue]) -> list[BoundReport]:
  """Evaluate a registered formula.

  Args:
      name: Formula id, one of ``FORMULAS``
      params: Named inputs; strings are parsed, missing ones are None

  Returns:
      One report per value the formula produces

  Raises:
      UnknownFormulaError: If the id is not registered
      BoundError: If a required parameter is missing or invalid
  """
  try:
    compute = FORMULAS[name]
  except KeyError:
    raise UnknownFormulaError(
      f"unknown formula '{name}', expected one of {', '.join(FORMULAS)}"
    )
  return compute(params)

