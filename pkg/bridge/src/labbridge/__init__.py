"""labbridge: a chat-model adapter for the lab gateway wire protocol.

Speaks the gateway's four prompted endpoints over HTTP — /plan, /guideline,
/visual_prompt, /verify — rendering each request into the lab-assistant
prompt suite, delegating to a chat VLM backend (or a recorded fixture set),
and normalizing whatever comes back into schema-conforming envelopes.
"""
from .backend import BackendTimeout, ChatBackend, FixtureMissing, FixturesBackend
from .bridge import BadEnvelope, Bridge, ENDPOINTS, UnknownEndpoint
from .config import BridgeConfig, ConfigError, load_config
from .conformance import run_conformance
from .normalize import NormalizationFailure
from .server import serve, serve_in_background

__version__ = "0.1.0"

__all__ = [
    "BackendTimeout",
    "BadEnvelope",
    "Bridge",
    "BridgeConfig",
    "ChatBackend",
    "ConfigError",
    "ENDPOINTS",
    "FixtureMissing",
    "FixturesBackend",
    "NormalizationFailure",
    "UnknownEndpoint",
    "load_config",
    "run_conformance",
    "serve",
    "serve_in_background",
    "__version__",
]
