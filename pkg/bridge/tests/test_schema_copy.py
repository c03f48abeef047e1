from pathlib import Path

import pytest

from labbridge.bridge import ENDPOINTS
from labbridge.schemas import check_value, load_schema, validate_envelope

_BRIDGE_COPY = Path(__file__).resolve().parents[1] / "src" / "labbridge" / "schema" / "envelopes.schema.json"
_GATEWAY_ORIGINAL = (
    Path(__file__).resolve().parents[2] / "src" / "labloop" / "gateway" / "envelopes.schema.json"
)


def test_schema_copy_matches_the_gateway_byte_for_byte():
    if not _GATEWAY_ORIGINAL.exists():
        pytest.skip("gateway schema not present in this checkout")
    assert _BRIDGE_COPY.read_bytes() == _GATEWAY_ORIGINAL.read_bytes()


def test_schema_covers_every_bridge_endpoint():
    schema = load_schema()
    for endpoint in ENDPOINTS:
        assert endpoint in schema["endpoints"]
        assert {"request", "response"} <= set(schema["endpoints"][endpoint])


def test_checker_keywords():
    schema = {
        "type": "object",
        "required": ["a"],
        "additionalProperties": False,
        "properties": {
            "a": {"type": "array", "items": {"type": "integer"}, "minItems": 1, "maxItems": 2},
            "b": {"type": ["string", "null"]},
            "c": {"enum": ["x", "y"]},
        },
    }
    assert check_value(schema, {"a": [1], "b": None, "c": "x"}) == []
    assert check_value(schema, {"a": [1], "b": "s"}) == []
    for bad, hint in [
        ({}, "missing"),
        ({"a": []}, "at least"),
        ({"a": [1, 2, 3]}, "at most"),
        ({"a": [True]}, "expected integer"),
        ({"a": [1], "z": 0}, "unexpected"),
        ({"a": [1], "b": 3}, "expected string/null"),
        ({"a": [1], "c": "z"}, "allowed values"),
        ([], "expected object"),
    ]:
        problems = check_value(schema, bad)
        assert problems and hint in problems[0]


def test_validate_envelope_follows_the_shipped_shapes():
    assert validate_envelope("/verify", "response", {"verdict": "Y"}) == []
    assert validate_envelope("/verify", "response", {"verdict": "yes"}) != []
    assert validate_envelope("/guideline", "response", {"text": None}) == []
    assert validate_envelope("/nope", "response", {}) == ["no schema for response /nope"]
