"""Conformance: replay recorded traffic and byte-compare the envelopes.

Each fixture is a triple —

    NAME.req.json       {"endpoint": "/verify", "payload": {...}}
    NAME.resp.txt       the raw model text that came back
    NAME.envelope.json  {"status": 200, "body": {...}} the bridge must emit

The bridge runs in fixtures mode and every actual outcome (including error
answers like a 502 for a corrupted verdict) is serialized to canonical JSON
and compared byte-for-byte against the expected envelope. The packaged
fixture set covers all four endpoints plus the awkward replies: a literal
"None" guideline, a bare "Y\\n" verdict, a mark list buried in prose, and a
"yes" verdict that must fail normalization.
"""
from __future__ import annotations

import json
from pathlib import Path

from .backend import FixtureMissing, FixturesBackend
from .bridge import Bridge, error_status
from .config import BridgeConfig
from .normalize import NormalizationFailure
from .templates import render

PACKAGED_FIXTURES = Path(__file__).parent / "fixtures"


def _canonical(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def run_conformance(fixture_dir: str | Path | None = None, config: BridgeConfig | None = None) -> dict:
    """Replay every fixture; returns the report as a JSON-ready dict.

    Raises FixtureMissing when the directory holds no usable fixtures or a
    fixture is incomplete — those are setup problems, not conformance
    verdicts.
    """
    root = Path(fixture_dir) if fixture_dir is not None else PACKAGED_FIXTURES
    config = config if config is not None else BridgeConfig()
    backend = FixturesBackend(
        root, lambda endpoint, payload: render(endpoint, payload, config.templates)
    )
    bridge = Bridge(config, backend)

    fixtures = []
    endpoints: set[str] = set()
    normalization_failures: list[str] = []
    for req_path in sorted(root.glob("*.req.json")):
        name = req_path.name[: -len(".req.json")]
        envelope_path = root / f"{name}.envelope.json"
        if not envelope_path.exists():
            raise FixtureMissing(f"fixture {name} has no .envelope.json")
        doc = json.loads(req_path.read_text("utf-8"))
        expected = json.loads(envelope_path.read_text("utf-8"))
        endpoint = doc["endpoint"]
        try:
            body = bridge.handle(endpoint, doc["payload"])
            actual = {"status": 200, "body": body}
        except Exception as exc:
            status, code = error_status(exc)
            actual = {"status": status, "body": {"error": code, "message": str(exc)}}
            if isinstance(exc, NormalizationFailure):
                normalization_failures.append(name)
        ok = _canonical(actual) == _canonical(expected)
        record = {"name": name, "endpoint": endpoint.lstrip("/"), "ok": ok}
        if not ok:
            record["expected"] = expected
            record["actual"] = actual
        fixtures.append(record)
        endpoints.add(endpoint.lstrip("/"))

    return {
        "passed": all(f["ok"] for f in fixtures),
        "endpoints": sorted(endpoints),
        "fixtures": fixtures,
        "normalization_failures": normalization_failures,
        "fixture_dir": str(root),
    }
