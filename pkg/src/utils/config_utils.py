"""Configuration file and environment handling for the command line.

A config file holds ``key=value`` lines using flag names without the leading
dashes (``budget_preset=s42``). Its values are turned into command line
arguments placed before the real ones, so explicit flags always win.
"""

import logging
import os
from pathlib import Path

LOG_LEVEL_ENV = "GOMEA_TRAP_LOG_LEVEL"

_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


class ConfigError(ValueError):
  """Raised for unreadable or malformed configuration files."""

  pass


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
  """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped.

  Raises:
      ConfigError: On a line without ``=``, an empty key or a repeated key
  """
  values: dict[str, str] = {}
  for lineno, raw in enumerate(text.splitlines(), start=1):
    line = raw.strip()
    if not line or line.startswith("#"):
      continue
    key, sep, value = line.partition("=")
    key = key.strip().replace("-", "_")
    if not sep or not key:
      raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
    if key in values:
      raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
    values[key] = value.strip()
  return values


def load_config(path: Path) -> dict[str, str]:
  """Read and parse a config file."""
  try:
    text = path.read_text(encoding="utf-8")
  except OSError as e:
    raise ConfigError(f"cannot read config file {path}: {e}")
  return parse_config_text(text, str(path))


def config_to_argv(values: dict[str, str], switches: set[str]) -> list[str]:
  """Turn config values into command line arguments.

  Args:
      values: Parsed config entries
      switches: Keys that are boolean flags taking no value

  Returns:
      Arguments such as ``["--budget-preset", "s42"]``; whitespace separated
      values become several arguments

  Raises:
      ConfigError: If a switch has a value other than a boolean word
  """
  argv: list[str] = []
  for key, value in values.items():
    flag = "--" + key.replace("_", "-")
    if key in switches:
      word = value.lower()
      if word in _TRUE:
        argv.append(flag)
      elif word not in _FALSE:
        raise ConfigError(f"'{key}' takes true or false, got {value!r}")
      continue
    argv.append(flag)
    argv.extend(value.split())
  return argv


def log_level_from_env(default: int = logging.INFO) -> int:
  """Level named by $GOMEA_TRAP_LOG_LEVEL, or ``default``."""
  name = os.environ.get(LOG_LEVEL_ENV, "").strip().upper()
  if not name:
    return default
  level = logging.getLevelName(name)
  return level if isinstance(level, int) else default
