"""The gateway envelope schema, and a checker for the keywords it uses.

The schema file is a verbatim copy of the one the gateway publishes; it is
the contract the bridge is built against, so every request is validated on
the way in and every normalized response on the way out. The checker
understands exactly the keyword subset the schema document declares: type,
required, properties, additionalProperties, items, minItems, maxItems, enum.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

_SCHEMA_PATH = Path(__file__).parent / "schema" / "envelopes.schema.json"
_cache: dict | None = None

_TYPE_CHECKS = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "number": lambda v: not isinstance(v, bool) and isinstance(v, (int, float)),
    "integer": lambda v: not isinstance(v, bool) and isinstance(v, int),
    "boolean": lambda v: isinstance(v, bool),
    "null": lambda v: v is None,
}


def load_schema() -> dict:
    global _cache
    if _cache is None:
        _cache = json.loads(_SCHEMA_PATH.read_text("utf-8"))
    return _cache


def check_value(schema: Mapping[str, Any], value, path: str = "$") -> list[str]:
    """Return every place value departs from schema; empty means conforming."""
    problems: list[str] = []
    kinds = schema.get("type")
    if kinds is not None:
        if isinstance(kinds, str):
            kinds = [kinds]
        if not any(_TYPE_CHECKS[k](value) for k in kinds):
            problems.append(f"{path}: expected {'/'.join(kinds)}")
            return problems
    if "enum" in schema and value not in schema["enum"]:
        problems.append(f"{path}: {value!r} not one of the allowed values")
    if isinstance(value, dict):
        properties = schema.get("properties", {})
        for name in schema.get("required", []):
            if name not in value:
                problems.append(f"{path}: missing field {name!r}")
        if schema.get("additionalProperties") is False:
            for name in value:
                if name not in properties:
                    problems.append(f"{path}: unexpected field {name!r}")
        for name, subschema in properties.items():
            if name in value:
                problems.extend(check_value(subschema, value[name], f"{path}.{name}"))
    if isinstance(value, list):
        if "minItems" in schema and len(value) < schema["minItems"]:
            problems.append(f"{path}: needs at least {schema['minItems']} items")
        if "maxItems" in schema and len(value) > schema["maxItems"]:
            problems.append(f"{path}: allows at most {schema['maxItems']} items")
        if "items" in schema:
            for i, item in enumerate(value):
                problems.extend(check_value(schema["items"], item, f"{path}[{i}]"))
    return problems


def validate_envelope(endpoint: str, direction: str, payload) -> list[str]:
    """direction is "request" or "response"."""
    schema = load_schema()
    try:
        node = schema["endpoints"][endpoint][direction]
    except KeyError:
        return [f"no schema for {direction} {endpoint}"]
    return check_value(node, payload)


def validate_error_body(payload) -> list[str]:
    return check_value(load_schema()["errors"]["response"], payload)
