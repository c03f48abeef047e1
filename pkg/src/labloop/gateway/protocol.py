"""Wire envelopes for the model gateway.

Six POST endpoints, JSON bodies, every request stamped with the experiment id
so servers can keep per-experiment session state:

    /plan          {experiment_id, task, apparatus[], primitive_menu[]} -> {steps}
    /guideline     {experiment_id, step_no, step_text, image_b64, scene_json?} -> {text|null}
    /visual_prompt {experiment_id, step_no, step_text, image_b64, scene_json?} -> {marks}
    /verify        {experiment_id, step_no, step_text, image_b64, scene_json?} -> {verdict}
    /policy/step   {experiment_id, observation, instruction} -> {actions, done}
    /policy/reset  {experiment_id} -> {}

Images travel as base64 binary PPM. Errors travel as {error, message} with a
non-2xx status. The same envelopes are used in-process and over HTTP.
"""
from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Mapping

from ..raster import RasterImage


class ProtocolError(Exception):
    """Base class for wire-protocol failures."""


class BadResponseShape(ProtocolError):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class BadVerdict(ProtocolError):
    def __init__(self, text: str):
        super().__init__(f"monitor verdict must be Y or N, got {text!r}")
        self.text = text


class ShapeError(ProtocolError):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class Transport(ProtocolError):
    def __init__(self, message: str, status: int | None = None, error: str | None = None):
        super().__init__(message)
        self.message = message
        self.status = status
        self.error = error


ACTION_DIM = 14


def normalize_verdict(text: str) -> bool:
    """Trim whitespace; accept exactly "Y" or "N", else BadVerdict."""
    if not isinstance(text, str):
        raise BadVerdict(repr(text))
    t = text.strip()
    if t == "Y":
        return True
    if t == "N":
        return False
    raise BadVerdict(text)


def image_to_b64(image: RasterImage) -> str:
    return base64.b64encode(image.to_ppm()).decode("ascii")


def image_from_b64(data: str) -> RasterImage:
    try:
        raw = base64.b64decode(data.encode("ascii"), validate=True)
    except Exception as exc:
        raise BadResponseShape(f"invalid base64 image payload: {exc}") from exc
    return RasterImage.from_ppm(raw)


def _need(obj: Mapping[str, Any], key: str, kind, where: str):
    if key not in obj:
        raise BadResponseShape(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise BadResponseShape(f"{where}: field {key!r} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise BadResponseShape(f"{where}: field {key!r} must be an integer")
        return value
    if not isinstance(value, kind):
        raise BadResponseShape(f"{where}: field {key!r} has wrong type")
    return value


def _str_list(obj: Mapping[str, Any], key: str, where: str) -> tuple[str, ...]:
    value = _need(obj, key, list, where)
    if not all(isinstance(v, str) for v in value):
        raise BadResponseShape(f"{where}: field {key!r} must be a list of strings")
    return tuple(value)


@dataclass(frozen=True)
class PlanRequest:
    experiment_id: str
    task: str
    apparatus: tuple[str, ...]
    primitive_menu: tuple[str, ...]

    def to_payload(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "task": self.task,
            "apparatus": list(self.apparatus),
            "primitive_menu": list(self.primitive_menu),
        }

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "PlanRequest":
        return cls(
            experiment_id=_need(obj, "experiment_id", str, "plan request"),
            task=_need(obj, "task", str, "plan request"),
            apparatus=_str_list(obj, "apparatus", "plan request"),
            primitive_menu=_str_list(obj, "primitive_menu", "plan request"),
        )


@dataclass(frozen=True)
class PlanResponse:
    steps: str

    def to_payload(self) -> dict:
        return {"steps": self.steps}

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "PlanResponse":
        return cls(steps=_need(obj, "steps", str, "plan response"))


@dataclass(frozen=True)
class StepQueryRequest:
    """Shared request body of /guideline, /visual_prompt, and /verify."""

    experiment_id: str
    step_no: int
    step_text: str
    image_b64: str
    scene_json: str | None = None

    def to_payload(self) -> dict:
        payload = {
            "experiment_id": self.experiment_id,
            "step_no": self.step_no,
            "step_text": self.step_text,
            "image_b64": self.image_b64,
        }
        if self.scene_json is not None:
            payload["scene_json"] = self.scene_json
        return payload

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any], where: str = "step request") -> "StepQueryRequest":
        scene_json = obj.get("scene_json")
        if scene_json is not None and not isinstance(scene_json, str):
            raise BadResponseShape(f"{where}: field 'scene_json' must be a string")
        return cls(
            experiment_id=_need(obj, "experiment_id", str, where),
            step_no=_need(obj, "step_no", int, where),
            step_text=_need(obj, "step_text", str, where),
            image_b64=_need(obj, "image_b64", str, where),
            scene_json=scene_json,
        )


class GuidelineRequest(StepQueryRequest):
    @classmethod
    def from_payload(cls, obj, where="guideline request"):
        return super().from_payload(obj, where)


class VisualPromptRequest(StepQueryRequest):
    @classmethod
    def from_payload(cls, obj, where="visual_prompt request"):
        return super().from_payload(obj, where)


class VerifyRequest(StepQueryRequest):
    @classmethod
    def from_payload(cls, obj, where="verify request"):
        return super().from_payload(obj, where)


@dataclass(frozen=True)
class GuidelineResponse:
    text: str | None

    def to_payload(self) -> dict:
        return {"text": self.text}

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "GuidelineResponse":
        if "text" not in obj:
            raise BadResponseShape("guideline response: missing field 'text'")
        text = obj["text"]
        if text is not None and not isinstance(text, str):
            raise BadResponseShape("guideline response: field 'text' must be string or null")
        return cls(text=text)


@dataclass(frozen=True)
class VisualPromptResponse:
    marks: tuple[dict, ...]

    def to_payload(self) -> dict:
        return {"marks": [dict(m) for m in self.marks]}

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "VisualPromptResponse":
        marks = _need(obj, "marks", list, "visual_prompt response")
        if not all(isinstance(m, dict) for m in marks):
            raise BadResponseShape("visual_prompt response: 'marks' must be a list of objects")
        return cls(marks=tuple(marks))


@dataclass(frozen=True)
class VerifyResponse:
    verdict: str

    def to_payload(self) -> dict:
        return {"verdict": self.verdict}

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "VerifyResponse":
        return cls(verdict=_need(obj, "verdict", str, "verify response"))


@dataclass(frozen=True)
class PolicyStepRequest:
    experiment_id: str
    observation: dict
    instruction: str

    def to_payload(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "observation": self.observation,
            "instruction": self.instruction,
        }

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "PolicyStepRequest":
        observation = _need(obj, "observation", dict, "policy_step request")
        return cls(
            experiment_id=_need(obj, "experiment_id", str, "policy_step request"),
            observation=observation,
            instruction=_need(obj, "instruction", str, "policy_step request"),
        )


@dataclass(frozen=True)
class PolicyStepResponse:
    actions: tuple[tuple[float, ...], ...]
    done: bool

    def __post_init__(self):
        if len(self.actions) < 1:
            raise ShapeError("action chunk must have at least one row")
        for row in self.actions:
            if len(row) != ACTION_DIM:
                raise ShapeError(f"action rows must have {ACTION_DIM} values, got {len(row)}")

    def to_payload(self) -> dict:
        return {"actions": [list(r) for r in self.actions], "done": self.done}

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "PolicyStepResponse":
        actions = _need(obj, "actions", list, "policy_step response")
        rows = []
        for row in actions:
            if not isinstance(row, list) or any(
                isinstance(v, bool) or not isinstance(v, (int, float)) for v in row
            ):
                raise BadResponseShape("policy_step response: 'actions' must be rows of numbers")
            rows.append(tuple(float(v) for v in row))
        done = obj.get("done")
        if not isinstance(done, bool):
            raise BadResponseShape("policy_step response: field 'done' must be a boolean")
        return cls(actions=tuple(rows), done=done)


@dataclass(frozen=True)
class PolicyResetRequest:
    experiment_id: str

    def to_payload(self) -> dict:
        return {"experiment_id": self.experiment_id}

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "PolicyResetRequest":
        return cls(experiment_id=_need(obj, "experiment_id", str, "policy_reset request"))


@dataclass(frozen=True)
class PolicyResetResponse:
    def to_payload(self) -> dict:
        return {}

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "PolicyResetResponse":
        return cls()


ENDPOINTS: dict[str, tuple[type, type]] = {
    "/plan": (PlanRequest, PlanResponse),
    "/guideline": (GuidelineRequest, GuidelineResponse),
    "/visual_prompt": (VisualPromptRequest, VisualPromptResponse),
    "/verify": (VerifyRequest, VerifyResponse),
    "/policy/step": (PolicyStepRequest, PolicyStepResponse),
    "/policy/reset": (PolicyResetRequest, PolicyResetResponse),
}


def decode_request(endpoint: str, payload: Mapping[str, Any]):
    if endpoint not in ENDPOINTS:
        raise BadResponseShape(f"unknown endpoint {endpoint!r}")
    return ENDPOINTS[endpoint][0].from_payload(payload)


def decode_response(endpoint: str, payload: Mapping[str, Any]):
    if endpoint not in ENDPOINTS:
        raise BadResponseShape(f"unknown endpoint {endpoint!r}")
    return ENDPOINTS[endpoint][1].from_payload(payload)


def observation_payload(obs) -> dict:
    """Encode a PolicyObservation for the /policy/step envelope (views as
    base64 PPM; the prompted overlay rides along when present)."""
    payload = {
        "views": {name: image_to_b64(img) for name, img in obs.views.items()},
        "proprio": [float(v) for v in obs.proprio],
        "instruction": obs.instruction,
        "prompt_flag": obs.prompt_flag,
    }
    if obs.prompted is not None:
        payload["prompted_b64"] = image_to_b64(obs.prompted.rendered)
    return payload


# --- envelope schema ----------------------------------------------------------

_SCHEMA_CACHE: dict | None = None


def load_schema() -> dict:
    """The JSON document describing every endpoint's request/response shape."""
    global _SCHEMA_CACHE
    if _SCHEMA_CACHE is None:
        text = resources.files(__package__).joinpath("envelopes.schema.json").read_text("utf-8")
        _SCHEMA_CACHE = json.loads(text)
    return _SCHEMA_CACHE


def _check(schema: Mapping[str, Any], obj, path: str, errors: list[str]):
    kinds = schema.get("type")
    if kinds is not None:
        if isinstance(kinds, str):
            kinds = [kinds]
        ok = False
        for kind in kinds:
            if kind == "object" and isinstance(obj, dict):
                ok = True
            elif kind == "array" and isinstance(obj, list):
                ok = True
            elif kind == "string" and isinstance(obj, str):
                ok = True
            elif kind == "number" and not isinstance(obj, bool) and isinstance(obj, (int, float)):
                ok = True
            elif kind == "integer" and not isinstance(obj, bool) and isinstance(obj, int):
                ok = True
            elif kind == "boolean" and isinstance(obj, bool):
                ok = True
            elif kind == "null" and obj is None:
                ok = True
        if not ok:
            errors.append(f"{path}: expected type {'/'.join(kinds)}")
            return
    if "enum" in schema and obj not in schema["enum"]:
        errors.append(f"{path}: value {obj!r} not in enum")
    if isinstance(obj, dict):
        props = schema.get("properties", {})
        for name in schema.get("required", []):
            if name not in obj:
                errors.append(f"{path}: missing required field {name!r}")
        if schema.get("additionalProperties") is False:
            for name in obj:
                if name not in props:
                    errors.append(f"{path}: unexpected field {name!r}")
        for name, sub in props.items():
            if name in obj:
                _check(sub, obj[name], f"{path}.{name}", errors)
    if isinstance(obj, list):
        if "minItems" in schema and len(obj) < schema["minItems"]:
            errors.append(f"{path}: fewer than {schema['minItems']} items")
        if "maxItems" in schema and len(obj) > schema["maxItems"]:
            errors.append(f"{path}: more than {schema['maxItems']} items")
        if "items" in schema:
            for i, item in enumerate(obj):
                _check(schema["items"], item, f"{path}[{i}]", errors)


def validate_envelope(endpoint: str, direction: str, payload) -> list[str]:
    """Validate a payload dict against the shipped schema; returns error list
    (empty = valid). direction is "request" or "response"."""
    schema = load_schema()
    try:
        node = schema["endpoints"][endpoint][direction]
    except KeyError:
        return [f"no schema for {direction} {endpoint}"]
    errors: list[str] = []
    _check(node, payload, "$", errors)
    return errors
