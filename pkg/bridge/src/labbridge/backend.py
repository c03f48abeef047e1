"""Backends: where rendered prompts go to get answered.

ChatBackend speaks the common chat-completions shape — POST
{base_url}/v1/chat/completions with the prompt as a user message and the
frame attached as a data URL — and returns the assistant text. Transport
failures (timeouts, refused connections) are retried up to max_retries and
then surface as BackendTimeout; replies with no assistant text surface as
NormalizationFailure.

FixturesBackend answers entirely from a directory of recorded pairs —
NAME.req.json (the request envelope that was sent) next to NAME.resp.txt
(the raw model text that came back). Requests are matched by rendering the
recorded envelope through the active templates and comparing prompt text,
so fixtures also pin the rendering: change a template and playback stops
matching. Fully offline, fully deterministic.
"""
from __future__ import annotations

import json
import os
import urllib.error
import urllib.request
from pathlib import Path
from typing import Callable, Mapping

from .normalize import NormalizationFailure


class BackendTimeout(Exception):
    """The backend could not be reached within the configured attempts."""


class FixtureMissing(Exception):
    """The fixture directory lacks what playback needs."""


class ChatBackend:
    def __init__(self, config):
        if not config.backend_url:
            raise ValueError("ChatBackend needs a backend_url")
        self.base_url = config.backend_url.rstrip("/")
        self.model = config.model
        self.api_key_env = config.api_key_env
        self.timeout_s = config.timeout_s
        self.max_retries = config.max_retries

    def complete(self, endpoint: str, prompt: str, image_b64: str | None = None) -> str:
        content: list[dict] = [{"type": "text", "text": prompt}]
        if image_b64 is not None:
            content.append(
                {
                    "type": "image_url",
                    "image_url": {"url": f"data:image/x-portable-pixmap;base64,{image_b64}"},
                }
            )
        body = json.dumps(
            {"model": self.model, "messages": [{"role": "user", "content": content}]}
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env, "") if self.api_key_env else ""
        if key:
            headers["Authorization"] = f"Bearer {key}"
        request = urllib.request.Request(
            f"{self.base_url}/v1/chat/completions", data=body, headers=headers, method="POST"
        )
        last: Exception | None = None
        for _ in range(self.max_retries + 1):
            try:
                with urllib.request.urlopen(request, timeout=self.timeout_s) as response:
                    return _assistant_text(json.loads(response.read().decode("utf-8")))
            except urllib.error.HTTPError as exc:
                # the backend answered, just not helpfully — not a transport
                # failure, so retrying the same request would not help
                raise NormalizationFailure(
                    f"backend answered status {exc.code}"
                ) from exc
            except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as exc:
                last = exc
        raise BackendTimeout(
            f"backend unreachable after {self.max_retries + 1} attempts: {last}"
        )


def _assistant_text(doc) -> str:
    try:
        content = doc["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise NormalizationFailure("backend reply carried no assistant message") from None
    if isinstance(content, str):
        return content
    if isinstance(content, list):
        parts = [p.get("text", "") for p in content if isinstance(p, dict)]
        if parts:
            return "".join(parts)
    raise NormalizationFailure("backend reply carried no assistant text")


class FixturesBackend:
    def __init__(self, fixture_dir: str | Path, render: Callable[[str, Mapping], str]):
        root = Path(fixture_dir)
        requests = sorted(root.glob("*.req.json"))
        if not requests:
            raise FixtureMissing(f"no *.req.json fixtures in {root}")
        self._replies: dict[tuple[str, str], str] = {}
        for req_path in requests:
            name = req_path.name[: -len(".req.json")]
            resp_path = root / f"{name}.resp.txt"
            if not resp_path.exists():
                raise FixtureMissing(f"fixture {name} has no .resp.txt")
            doc = json.loads(req_path.read_text("utf-8"))
            key = (doc["endpoint"], render(doc["endpoint"], doc["payload"]))
            if key in self._replies:
                raise FixtureMissing(f"fixture {name} duplicates an earlier prompt")
            self._replies[key] = resp_path.read_text("utf-8")

    def complete(self, endpoint: str, prompt: str, image_b64: str | None = None) -> str:
        try:
            return self._replies[(endpoint, prompt)]
        except KeyError:
            raise FixtureMissing(f"no recorded reply for this {endpoint} prompt") from None
