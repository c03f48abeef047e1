"""HTTP client speaking the gateway wire protocol.

Same typed surface as the in-process client, so the orchestrator can swap
transports without behavioral change. Network and server failures surface as
Transport (unknown tasks keep their identity).
"""
from __future__ import annotations

import json
import urllib.error
import urllib.request

import numpy as np

from ..marks import VisualMark, parse_marks
from ..simlab.fixtures import UnknownTask
from .protocol import (
    GuidelineResponse,
    PlanRequest,
    PlanResponse,
    PolicyResetRequest,
    PolicyStepRequest,
    PolicyStepResponse,
    StepQueryRequest,
    Transport,
    VerifyResponse,
    VisualPromptResponse,
    normalize_verdict,
    observation_payload,
)


class HttpGateway:
    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def _post(self, endpoint: str, payload: dict) -> dict:
        body = json.dumps(payload).encode("utf-8")
        request = urllib.request.Request(
            self.base_url + endpoint,
            data=body,
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                raw = resp.read()
        except urllib.error.HTTPError as exc:
            raw = exc.read()
            try:
                doc = json.loads(raw.decode("utf-8"))
                code = doc.get("error", "http_error")
                message = doc.get("message", "")
            except Exception:
                code, message = "http_error", raw.decode("utf-8", "replace")
            if code == "unknown_task":
                raise UnknownTask(message) from exc
            raise Transport(
                f"{endpoint} failed with status {exc.code}: {code}: {message}",
                status=exc.code,
                error=code,
            ) from exc
        except OSError as exc:
            raise Transport(f"{endpoint} unreachable: {exc}") from exc
        try:
            doc = json.loads(raw.decode("utf-8"))
        except ValueError as exc:
            raise Transport(f"{endpoint} returned non-JSON body") from exc
        if not isinstance(doc, dict):
            raise Transport(f"{endpoint} returned a non-object body")
        return doc

    def plan(self, experiment_id, task, apparatus, primitive_menu) -> str:
        req = PlanRequest(
            experiment_id=experiment_id,
            task=task,
            apparatus=tuple(apparatus),
            primitive_menu=tuple(primitive_menu),
        )
        return PlanResponse.from_payload(self._post("/plan", req.to_payload())).steps

    def _step_query(self, endpoint, experiment_id, step_no, step_text, image_b64, scene_json):
        req = StepQueryRequest(
            experiment_id=experiment_id,
            step_no=step_no,
            step_text=step_text,
            image_b64=image_b64 or "",
            scene_json=scene_json,
        )
        return self._post(endpoint, req.to_payload())

    def guideline(self, experiment_id, step_no, step_text, image_b64=None, scene_json=None):
        doc = self._step_query("/guideline", experiment_id, step_no, step_text, image_b64, scene_json)
        return GuidelineResponse.from_payload(doc).text

    def visual_prompt(
        self, experiment_id, step_no, step_text, image_b64=None, scene_json=None
    ) -> list[VisualMark]:
        doc = self._step_query(
            "/visual_prompt", experiment_id, step_no, step_text, image_b64, scene_json
        )
        marks = VisualPromptResponse.from_payload(doc).marks
        return parse_marks(json.dumps(list(marks)))

    def verify(self, experiment_id, step_no, step_text, image_b64=None, scene_json=None) -> bool:
        doc = self._step_query("/verify", experiment_id, step_no, step_text, image_b64, scene_json)
        return normalize_verdict(VerifyResponse.from_payload(doc).verdict)

    def policy_step(self, experiment_id, observation) -> tuple[np.ndarray, bool]:
        obs_payload = (
            observation if isinstance(observation, dict) else observation_payload(observation)
        )
        req = PolicyStepRequest(
            experiment_id=experiment_id,
            observation=obs_payload,
            instruction=obs_payload["instruction"],
        )
        resp = PolicyStepResponse.from_payload(self._post("/policy/step", req.to_payload()))
        return np.asarray(resp.actions, dtype=np.float64), resp.done

    def policy_reset(self, experiment_id) -> None:
        req = PolicyResetRequest(experiment_id=experiment_id)
        self._post("/policy/reset", req.to_payload())
