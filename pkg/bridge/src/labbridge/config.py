"""Bridge configuration: backend coordinates plus the prompt templates.

Config travels as a JSON file; the API key never does — the file names an
environment variable and the key is read from the process environment at
request time. Template overrides are validated on construction: a template
missing its role's substitution slots would render the same prompt for
every step, so that is a configuration error, not a runtime surprise.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .templates import DEFAULT_TEMPLATES, REQUIRED_PLACEHOLDERS, ROLES


class ConfigError(Exception):
    """The config file or template set cannot be used."""


@dataclass(frozen=True)
class BridgeConfig:
    backend_url: str = ""
    model: str = ""
    api_key_env: str = "LABBRIDGE_API_KEY"
    templates: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_TEMPLATES))
    timeout_s: float = 30.0
    max_retries: int = 2
    max_in_flight: int = 8

    def __post_init__(self):
        if set(self.templates) != set(ROLES):
            missing = sorted(set(ROLES) - set(self.templates))
            extra = sorted(set(self.templates) - set(ROLES))
            detail = []
            if missing:
                detail.append(f"missing templates for {missing}")
            if extra:
                detail.append(f"unknown template roles {extra}")
            raise ConfigError("; ".join(detail))
        for role in ROLES:
            for slot in REQUIRED_PLACEHOLDERS[role]:
                if slot not in self.templates[role]:
                    raise ConfigError(f"{role} template lacks the {slot} slot")
        if self.timeout_s <= 0:
            raise ConfigError("timeout_s must be positive")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight must be >= 1")


_FILE_KEYS = {
    "backend_url": str,
    "model": str,
    "api_key_env": str,
    "templates": dict,
    "timeout_s": (int, float),
    "max_retries": int,
    "max_in_flight": int,
}


def load_config(path: str | Path | None = None) -> BridgeConfig:
    """Defaults, overlaid with the JSON file when one is given.

    The templates key may override any subset of roles; the rest keep their
    defaults.
    """
    if path is None:
        return BridgeConfig()
    try:
        raw = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    values: dict = {}
    for key, value in raw.items():
        if key not in _FILE_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        kind = _FILE_KEYS[key]
        if isinstance(value, bool) or not isinstance(value, kind):
            raise ConfigError(f"config key {key!r} has the wrong type")
        values[key] = value
    if "templates" in values:
        overrides = values["templates"]
        if not all(isinstance(v, str) for v in overrides.values()):
            raise ConfigError("template overrides must be strings")
        merged = dict(DEFAULT_TEMPLATES)
        merged.update(overrides)
        values["templates"] = merged
    if "timeout_s" in values:
        values["timeout_s"] = float(values["timeout_s"])
    return BridgeConfig(**values)
