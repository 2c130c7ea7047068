"""TOML-style key/value config files mirroring the CLI flags.

Only the flat ``key = value`` subset is supported: quoted strings, booleans,
integers, floats and ``#`` comments.  Keys use either hyphens or
underscores; values feed the same resolution path as command-line flags.
"""

from __future__ import annotations

from pathlib import Path

from ..errors import ConfigError


def parse_config_text(text: str) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip().replace("-", "_")
        if not key.replace("_", "").isalnum():
            raise ConfigError(f"line {lineno}: bad key {key!r}")
        values[key] = _parse_value(rhs.strip(), lineno)
    return values


def _parse_value(rhs: str, lineno: int) -> object:
    if rhs.startswith('"'):
        if len(rhs) < 2 or not rhs.endswith('"') or '"' in rhs[1:-1]:
            raise ConfigError(f"line {lineno}: unterminated string {rhs!r}")
        return rhs[1:-1]
    if "#" in rhs:  # trailing comment after a bare value
        rhs = rhs.split("#", 1)[0].strip()
    if rhs in ("true", "false"):
        return rhs == "true"
    try:
        return int(rhs)
    except ValueError:
        pass
    try:
        return float(rhs)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse value {rhs!r}") from None


def load_config(path: str | Path) -> dict[str, object]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {p} does not exist")
    return parse_config_text(p.read_text())
