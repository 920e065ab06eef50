"""Plain-text key/value configuration files.

Format: one ``key = value`` pair per line; blank lines and lines starting
with ``#`` are ignored.  Keys are case-sensitive.  Duplicate keys are an
error (they are almost always a typo in a hand-edited file).
"""

from __future__ import annotations

import os

from .errors import ConfigError, DataError


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {line_no}: empty key")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        values[key] = value
    return values


def read_config(path: str | os.PathLike) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


class ConfigView:
    """Typed accessors over a raw key/value mapping.

    Missing keys fall back to the supplied default; a default of
    ``_REQUIRED`` raises.  All type failures raise :class:`ConfigError`
    naming the key.
    """

    _REQUIRED = object()

    def __init__(self, values: dict[str, str], source: str = "<config>"):
        self.values = dict(values)
        self.source = source
        self._used: set[str] = set()

    def _raw(self, key, default):
        if key in self.values:
            self._used.add(key)
            return self.values[key]
        if default is self._REQUIRED:
            raise ConfigError(f"{self.source}: missing required key {key!r}")
        return default

    def has(self, key: str) -> bool:
        return key in self.values

    def get_str(self, key, default=_REQUIRED) -> str:
        value = self._raw(key, default)
        return value if isinstance(value, str) else value

    def get_int(self, key, default=_REQUIRED) -> int:
        value = self._raw(key, default)
        if isinstance(value, int):
            return value
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"{self.source}: key {key!r} is not an integer: {value!r}") from exc

    def get_float(self, key, default=_REQUIRED) -> float:
        value = self._raw(key, default)
        if isinstance(value, (int, float)):
            return float(value)
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"{self.source}: key {key!r} is not a number: {value!r}") from exc

    def get_bool(self, key, default=_REQUIRED) -> bool:
        value = self._raw(key, default)
        if isinstance(value, bool):
            return value
        lowered = value.lower()
        if lowered in ("true", "yes", "1"):
            return True
        if lowered in ("false", "no", "0"):
            return False
        raise ConfigError(f"{self.source}: key {key!r} is not a boolean: {value!r}")

    def get_choice(self, key, choices, default=_REQUIRED) -> str:
        value = self._raw(key, default)
        if value not in choices:
            raise ConfigError(
                f"{self.source}: key {key!r} must be one of {sorted(choices)}, got {value!r}"
            )
        return value

    def get_floats(self, key, default=_REQUIRED) -> list[float]:
        """Comma-separated list of numbers."""
        value = self._raw(key, default)
        if not isinstance(value, str):
            return value
        try:
            return [float(tok) for tok in value.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"{self.source}: key {key!r} is not a number list: {value!r}") from exc

    def unused_keys(self) -> list[str]:
        return sorted(set(self.values) - self._used)
