"""HTTP/1.1 front end for the bridge.

Same wire conventions as the gateway it stands in for: POST-only JSON
endpoints, failures as {error, message} with a non-2xx status. Requests are
stateless, and a bounded in-flight cap protects the backend — when every
slot is busy the answer is an immediate 503 rather than a queued call that
would blow the backend's own limits.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .backend import ChatBackend, FixturesBackend
from .bridge import ENDPOINTS, Bridge, error_status
from .config import BridgeConfig
from .templates import render


class BridgeHTTPRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "labloop-bridge"

    def log_message(self, fmt, *args):
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
                raise ValueError("request body must be a JSON object")
        except (ValueError, UnicodeDecodeError) as exc:
            self._reply(400, {"error": "bad_json", "message": str(exc)})
            return
        if not self.server.slots.acquire(blocking=False):
            self._reply(503, {"error": "busy", "message": "in-flight cap reached"})
            return
        try:
            response = self.server.bridge.handle(self.path, payload)
        except Exception as exc:
            status, code = error_status(exc)
            self._reply(status, {"error": code, "message": str(exc)})
            return
        finally:
            self.server.slots.release()
        self._reply(200, response)


class BridgeHTTPServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], bridge: Bridge, verbose: bool = False):
        super().__init__(address, BridgeHTTPRequestHandler)
        self.bridge = bridge
        self.verbose = verbose
        self.slots = threading.BoundedSemaphore(bridge.config.max_in_flight)


def make_bridge(config: BridgeConfig, fixture_dir: str | None = None, backend=None) -> Bridge:
    """Wire up a bridge: an explicit backend wins, then fixtures, then chat."""
    if backend is None:
        if fixture_dir is not None:
            backend = FixturesBackend(
                fixture_dir, lambda endpoint, payload: render(endpoint, payload, config.templates)
            )
        else:
            backend = ChatBackend(config)
    return Bridge(config, backend)


def serve(
    config: BridgeConfig,
    host: str = "127.0.0.1",
    port: int = 0,
    fixture_dir: str | None = None,
    backend=None,
    verbose: bool = False,
) -> BridgeHTTPServer:
    """Bind and return the server (not yet serving); port 0 picks a free port."""
    bridge = make_bridge(config, fixture_dir=fixture_dir, backend=backend)
    return BridgeHTTPServer((host, port), bridge, verbose=verbose)


def serve_in_background(config: BridgeConfig, **kwargs):
    """Start serving on a daemon thread; returns (server, thread)."""
    server = serve(config, **kwargs)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
