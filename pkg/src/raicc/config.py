"""Analysis configuration: defaults, ``key=value`` files and overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "RAICC_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AnalysisConfig:
    widen_cap: int = 8
    max_iterations: int = 10000
    call_depth: int = 1

    def with_overrides(self, pairs: dict[str, str]) -> "AnalysisConfig":
        known = {f"prop.{f.name}": f.name for f in fields(self)}
        changes = {}
        for key, raw in pairs.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                value = int(raw)
            except ValueError:
                raise ConfigError(f"config key {key} expects an integer, got {raw!r}") from None
            if value < 0 or (key == "prop.widen_cap" and value < 1):
                raise ConfigError(f"config key {key} out of range: {value}")
            changes[known[key]] = value
        return replace(self, **changes)


def parse_pairs(text: str) -> dict[str, str]:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def load_config(path=None, overrides: dict[str, str] | None = None) -> AnalysisConfig:
    """Defaults, then the file at ``path`` (or ``$RAICC_CONFIG``), then ``overrides``."""
    cfg = AnalysisConfig()
    path = path or os.environ.get(ENV_VAR)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        cfg = cfg.with_overrides(parse_pairs(text))
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg
