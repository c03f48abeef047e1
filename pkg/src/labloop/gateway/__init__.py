"""Wire protocol, mock role servers, and HTTP bindings for the model gateway."""
from .protocol import (
    ACTION_DIM,
    BadResponseShape,
    BadVerdict,
    ENDPOINTS,
    ProtocolError,
    ShapeError,
    Transport,
    decode_request,
    decode_response,
    image_from_b64,
    image_to_b64,
    load_schema,
    normalize_verdict,
    observation_payload,
    validate_envelope,
)
from .mock import (
    DEFAULT_ACTION_HORIZON,
    DEFAULT_POLICY_DONE_TICKS,
    MockGateway,
    MockGatewayClient,
    compute_marks,
    guideline_text,
    verify_scene,
)
from .httpserver import GatewayHTTPServer, serve, serve_in_background
from .httpclient import HttpGateway

__all__ = [
    "ACTION_DIM",
    "BadResponseShape",
    "BadVerdict",
    "DEFAULT_ACTION_HORIZON",
    "DEFAULT_POLICY_DONE_TICKS",
    "ENDPOINTS",
    "GatewayHTTPServer",
    "HttpGateway",
    "MockGateway",
    "MockGatewayClient",
    "ProtocolError",
    "ShapeError",
    "Transport",
    "compute_marks",
    "decode_request",
    "decode_response",
    "guideline_text",
    "image_from_b64",
    "image_to_b64",
    "load_schema",
    "normalize_verdict",
    "observation_payload",
    "serve",
    "serve_in_background",
    "validate_envelope",
    "verify_scene",
]
