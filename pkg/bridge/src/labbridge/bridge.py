"""The bridge core: one request envelope in, one response envelope out.

Exactly four endpoints — the prompted roles. Policy endpoints are
deliberately absent: this adapter fronts a chat model, and action inference
lives elsewhere. Every request is schema-checked before rendering and every
normalized response is schema-checked before it leaves, so whatever the
backend does, the wire only ever carries conforming envelopes.
"""
from __future__ import annotations

from typing import Mapping

from .backend import BackendTimeout, FixtureMissing
from .config import BridgeConfig
from .normalize import (
    NormalizationFailure,
    normalize_guideline,
    normalize_marks,
    normalize_plan,
    normalize_verify,
)
from .schemas import validate_envelope
from .templates import render

ENDPOINTS = ("/plan", "/guideline", "/visual_prompt", "/verify")


class UnknownEndpoint(Exception):
    def __init__(self, endpoint: str):
        super().__init__(f"the bridge does not serve {endpoint!r}")
        self.endpoint = endpoint


class BadEnvelope(Exception):
    """The request payload does not match the endpoint's schema."""


_NORMALIZERS = {
    "/plan": lambda reply: {"steps": normalize_plan(reply)},
    "/guideline": lambda reply: {"text": normalize_guideline(reply)},
    "/visual_prompt": lambda reply: {"marks": normalize_marks(reply)},
    "/verify": lambda reply: {"verdict": normalize_verify(reply)},
}


class Bridge:
    def __init__(self, config: BridgeConfig, backend):
        self.config = config
        self.backend = backend

    def handle(self, endpoint: str, payload: Mapping) -> dict:
        if endpoint not in ENDPOINTS:
            raise UnknownEndpoint(endpoint)
        problems = validate_envelope(endpoint, "request", payload)
        if problems:
            raise BadEnvelope("; ".join(problems))
        prompt = render(endpoint, payload, self.config.templates)
        reply = self.backend.complete(endpoint, prompt, image_b64=payload.get("image_b64"))
        response = _NORMALIZERS[endpoint](reply)
        leftover = validate_envelope(endpoint, "response", response)
        if leftover:
            # normalization accepted something the envelope schema rejects;
            # still a 502, never a malformed 200
            raise NormalizationFailure("; ".join(leftover))
        return response


def error_status(exc: Exception) -> tuple[int, str]:
    """Map a bridge failure to (HTTP status, wire error code)."""
    if isinstance(exc, BadEnvelope):
        return 400, "bad_envelope"
    if isinstance(exc, NormalizationFailure):
        return 502, "normalization_failure"
    if isinstance(exc, BackendTimeout):
        return 502, "backend_timeout"
    if isinstance(exc, FixtureMissing):
        return 502, "fixture_missing"
    if isinstance(exc, UnknownEndpoint):
        return 404, "unknown_endpoint"
    return 500, "internal"
