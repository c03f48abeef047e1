"""HTTP/1.1 front end for any object exposing handle(endpoint, payload).

POST-only JSON endpoints at the protocol paths; failures answer a non-2xx
status with an {error, message} body.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..grammar import PlanError
from ..simlab.fixtures import UnknownTask
from ..simlab.scene import MissingContainer, SceneError
from ..marks import MarkParseError
from ..raster import PpmError
from .protocol import BadResponseShape, ENDPOINTS, ShapeError


def error_status(exc: Exception) -> tuple[int, str]:
    """Map an exception to (HTTP status, wire error code)."""
    if isinstance(exc, UnknownTask):
        return 404, "unknown_task"
    if isinstance(exc, BadResponseShape):
        return 400, "bad_envelope"
    if isinstance(exc, (PlanError, MarkParseError, PpmError, SceneError,
                        MissingContainer, ShapeError, ValueError, KeyError)):
        return 400, "bad_request"
    return 500, "internal"


class GatewayHTTPRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "labloop-gateway"

    def log_message(self, fmt, *args):  # silence default stderr chatter
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        self._reply(405, {"error": "method_not_allowed", "message": "POST only"})

    def do_POST(self):
        if self.path not in ENDPOINTS:
            self._reply(404, {"error": "unknown_endpoint", "message": self.path})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            payload = json.loads(raw.decode("utf-8")) if raw else {}
            if not isinstance(payload, dict):
                raise BadResponseShape("request body must be a JSON object")
        except (ValueError, UnicodeDecodeError) as exc:
            self._reply(400, {"error": "bad_json", "message": str(exc)})
            return
        try:
            response = self.server.gateway.handle(self.path, payload)
        except Exception as exc:  # map every failure onto the wire error shape
            status, code = error_status(exc)
            self._reply(status, {"error": code, "message": str(exc)})
            return
        self._reply(200, response)


class GatewayHTTPServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], gateway, verbose: bool = False):
        super().__init__(address, GatewayHTTPRequestHandler)
        self.gateway = gateway
        self.verbose = verbose


def serve(gateway, host: str = "127.0.0.1", port: int = 0, verbose: bool = False) -> GatewayHTTPServer:
    """Bind and return the server (not yet serving); port 0 picks a free port."""
    return GatewayHTTPServer((host, port), gateway, verbose=verbose)


def serve_in_background(gateway, host: str = "127.0.0.1", port: int = 0):
    """Start serving on a daemon thread; returns (server, thread)."""
    server = serve(gateway, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
