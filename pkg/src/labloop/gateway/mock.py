"""In-process mock servers for the four model roles and the policy.

The mock planner replays the fixture plan for known task ids; the guideline
role returns short templated safety notes; the prompter computes marks from
scene geometry; the monitor answers Y/N by inspecting the serialized scene
(never pixels); the policy is a scripted tick machine that reports done after
a fixed budget and emits a deterministic sinusoidal action chunk.

All responses are deterministic given (task, seed, request history). Session
state is keyed by the experiment id carried in every envelope, so concurrent
experiments never interfere.
"""
from __future__ import annotations

import threading
import zlib
from dataclasses import dataclass

import numpy as np

from ..grammar import (
    PrimitiveTask,
    PrimitiveVerb,
    PRIMITIVE_MENU,
    bind_predicate,
    parse_primitive,
)
from ..marks import VisualMark
from ..simlab.effects import check_condition
from ..simlab.fixtures import get_fixture
from ..simlab.scene import LabScene, MissingContainer
from .protocol import (
    ACTION_DIM,
    GuidelineRequest,
    GuidelineResponse,
    PlanRequest,
    PlanResponse,
    PolicyResetRequest,
    PolicyResetResponse,
    PolicyStepRequest,
    PolicyStepResponse,
    VerifyRequest,
    VerifyResponse,
    VisualPromptRequest,
    VisualPromptResponse,
    decode_request,
)

DEFAULT_POLICY_DONE_TICKS = 20
DEFAULT_ACTION_HORIZON = 50


@dataclass
class _PolicySession:
    ticks_in_primitive: int = 0
    total_ticks: int = 0


def _box(container) -> VisualMark:
    x, y, w, h = container.pose
    return VisualMark(kind="box", coordinates=(x, y, x + w - 1, y + h - 1), role="region")


def _point(container, fy_num: int, fy_den: int, role: str) -> VisualMark:
    x, y, w, h = container.pose
    return VisualMark(
        kind="point",
        coordinates=(x + w // 2, y + fy_num * h // fy_den),
        role=role,
    )


def compute_marks(scene: LabScene, step: PrimitiveTask) -> list[VisualMark]:
    """The mock prompter's geometry rules. Empty list when nothing applies."""
    verb = step.verb
    try:
        if verb is PrimitiveVerb.GRASP:
            target = scene.resolve(step.slot("object"))
            return [_box(target), _point(target, 1, 3, "grasp_point")]
        if verb is PrimitiveVerb.HEAT:
            lamps = [c for c in scene.containers.values() if c.kind == "alcohol_lamp"]
            if not lamps:
                return []
            lamp = lamps[0]
            x, y, w, h = lamp.pose
            return [
                VisualMark(
                    kind="point",
                    coordinates=(x + w // 2, max(y - h // 6, 0)),
                    role="target_point",
                )
            ]
        if verb is PrimitiveVerb.DIP:
            bath = scene.resolve(step.slot("container"))
            return [_box(bath), _point(bath, 1, 2, "target_point")]
        if verb is PrimitiveVerb.POUR:
            source = scene.resolve(step.slot("source_container"))
            dest = scene.resolve(step.slot("dest_container"))
            if scene.ambiguity is not None and dest.container_id in scene.ambiguity.candidate_ids:
                dest = scene.container(scene.ambiguity.target_id)
            return [
                _box(source),
                _point(source, 1, 3, "grasp_point"),
                _box(dest),
                _point(dest, 1, 3, "grasp_point"),
            ]
        if verb is PrimitiveVerb.STIR:
            return [_box(scene.resolve(step.slot("mixture")))]
        if verb is PrimitiveVerb.TRANSFER:
            source = scene.resolve(step.slot("source_container"))
            dest = scene.resolve(step.slot("dest_container"))
            return [
                _box(source),
                _point(source, 2, 3, "target_point"),
                _box(dest),
                _point(dest, 1, 2, "target_point"),
            ]
        return []  # Press: nothing to mark
    except MissingContainer:
        return []


def guideline_text(step: PrimitiveTask) -> str | None:
    """Templated one-or-two-sentence operating guidance per primitive."""
    verb = step.verb
    if verb is PrimitiveVerb.GRASP:
        obj = step.slot("object").casefold()
        if "rod" in obj:
            return (
                "Grasp the glass rod at about one third of its length from the top,"
                " and lift it gently without striking nearby glassware."
            )
        if "test tube" in obj or "tube" in obj:
            return (
                "Grasp the test tube by its upper body, keeping it upright"
                " and away from your hand's reach over the flame."
            )
        return f"Grasp the {step.slot('object')} gently and keep a secure grip."
    if verb is PrimitiveVerb.HEAT:
        obj = step.slot("object").casefold()
        if "tube" in obj:
            return (
                "Hold the test tube by its upper body and heat it in the outer flame,"
                " pointing the mouth away from anyone."
            )
        return (
            "Extend the tip into the outer flame, the hottest region,"
            " and keep the grip on the upper body."
        )
    if verb is PrimitiveVerb.DIP:
        return (
            "Insert the tip just below the liquid surface"
            " without touching the container walls."
        )
    if verb is PrimitiveVerb.POUR:
        return "Pour slowly along the container wall to avoid splashing."
    if verb is PrimitiveVerb.STIR:
        return "Stir gently in small circles without striking the container walls."
    if verb is PrimitiveVerb.TRANSFER:
        return "Scoop the solid with a clean spatula and add it slowly to avoid spilling."
    return None  # Press: no safety constraint modeled


def verify_scene(scene: LabScene, step: PrimitiveTask) -> bool:
    """The mock monitor's verdict.

    A step text carrying an until-clause asks the completion question (is the
    condition achieved?); plain text asks the execution question (did the
    primitive's effect land?).
    """
    if step.until is not None:
        bind_predicate(step.until)
        return check_condition(scene, step.until)

    verb = step.verb
    if verb is PrimitiveVerb.GRASP:
        try:
            target = scene.resolve(step.slot("object"))
        except MissingContainer:
            return False
        return target.container_id in scene.held.values()
    if verb in (PrimitiveVerb.POUR, PrimitiveVerb.TRANSFER):
        event = scene.last_event(verb.value)
        if event is None:
            return False
        return event.get("delivered_fraction", 0.0) > 0.0 and bool(event.get("moved"))
    if verb is PrimitiveVerb.DIP:
        try:
            wire = scene.resolve(step.slot("object"))
        except MissingContainer:
            return False
        return wire.dipped_species is not None
    if verb is PrimitiveVerb.HEAT:
        event = scene.last_event(verb.value)
        return event is not None and event["category"] != "no_heat"
    if verb is PrimitiveVerb.STIR:
        event = scene.last_event(verb.value)
        return event is not None and event["category"] != "no_contact"
    # Press
    event = scene.last_event(verb.value)
    return event is not None and bool(event.get("activated"))


class MockGateway:
    """All six endpoints, served in-process.

    Typed methods are the fast path used by the orchestrator; ``handle``
    speaks the JSON envelopes for the HTTP server and conformance tests.
    """

    def __init__(
        self,
        *,
        policy_done_ticks: int = DEFAULT_POLICY_DONE_TICKS,
        action_horizon: int = DEFAULT_ACTION_HORIZON,
    ):
        if policy_done_ticks < 1:
            raise ValueError("policy_done_ticks must be >= 1")
        if action_horizon < 1:
            raise ValueError("action_horizon must be >= 1")
        self.policy_done_ticks = policy_done_ticks
        self.action_horizon = action_horizon
        self._sessions: dict[str, _PolicySession] = {}
        self._lock = threading.Lock()

    # -- model roles -----------------------------------------------------------

    def plan(self, experiment_id: str, task: str, apparatus, primitive_menu) -> str:
        if tuple(primitive_menu) != PRIMITIVE_MENU:
            raise ValueError("plan request must carry the canonical 7-primitive menu")
        return get_fixture(task).plan_text

    def guideline(
        self,
        experiment_id: str,
        step_no: int,
        step_text: str,
        scene_json: str | None = None,
        image_b64: str | None = None,
    ) -> str | None:
        return guideline_text(parse_primitive(step_text))

    def visual_prompt(
        self,
        experiment_id: str,
        step_no: int,
        step_text: str,
        scene_json: str | None = None,
        image_b64: str | None = None,
    ) -> list[VisualMark]:
        # image_b64 is accepted for wire parity and ignored: the mock works
        # from the serialized scene, never from pixels
        if scene_json is None:
            raise ValueError("the mock prompter needs the serialized scene")
        scene = LabScene.from_json(scene_json)
        return compute_marks(scene, parse_primitive(step_text))

    def verify(
        self,
        experiment_id: str,
        step_no: int,
        step_text: str,
        scene_json: str | None = None,
        image_b64: str | None = None,
    ) -> bool:
        if scene_json is None:
            raise ValueError("the mock monitor needs the serialized scene")
        scene = LabScene.from_json(scene_json)
        return verify_scene(scene, parse_primitive(step_text))

    # -- policy ----------------------------------------------------------------

    def _session(self, experiment_id: str) -> _PolicySession:
        with self._lock:
            if experiment_id not in self._sessions:
                self._sessions[experiment_id] = _PolicySession()
            return self._sessions[experiment_id]

    def action_chunk(self, instruction: str, tick: int) -> np.ndarray:
        """Deterministic H x 14 chunk: a low-amplitude sinusoid whose phase is
        derived from the instruction text and the session tick."""
        phase = (zlib.crc32(instruction.encode("utf-8")) % 997) * 0.037
        rows = np.arange(tick, tick + self.action_horizon, dtype=np.float64)[:, None]
        cols = np.arange(ACTION_DIM, dtype=np.float64)[None, :]
        return 0.2 * np.sin(phase + 0.11 * rows + 0.7 * cols)

    def policy_step(self, experiment_id: str, observation) -> tuple[np.ndarray, bool]:
        """observation is a PolicyObservation (fast path) or the envelope's
        observation dict; only the instruction influences the mock."""
        instruction = (
            observation["instruction"]
            if isinstance(observation, dict)
            else observation.instruction
        )
        with self._lock:
            session = self._sessions.setdefault(experiment_id, _PolicySession())
            session.ticks_in_primitive += 1
            session.total_ticks += 1
            tick = session.total_ticks
            done = session.ticks_in_primitive >= self.policy_done_ticks
            if done:
                session.ticks_in_primitive = 0
        return self.action_chunk(instruction, tick), done

    def policy_reset(self, experiment_id: str) -> None:
        with self._lock:
            session = self._sessions.setdefault(experiment_id, _PolicySession())
            session.ticks_in_primitive = 0

    # -- envelope layer ----------------------------------------------------------

    def handle(self, endpoint: str, payload: dict) -> dict:
        """Decode an envelope, dispatch, encode the response payload."""
        req = decode_request(endpoint, payload)
        if isinstance(req, PlanRequest):
            steps = self.plan(req.experiment_id, req.task, req.apparatus, req.primitive_menu)
            return PlanResponse(steps=steps).to_payload()
        if isinstance(req, GuidelineRequest):
            text = self.guideline(req.experiment_id, req.step_no, req.step_text, req.scene_json)
            return GuidelineResponse(text=text).to_payload()
        if isinstance(req, VisualPromptRequest):
            marks = self.visual_prompt(
                req.experiment_id, req.step_no, req.step_text, req.scene_json
            )
            return VisualPromptResponse(
                marks=tuple(
                    {"type": m.kind, "coordinates": list(m.coordinates), "role": m.role}
                    for m in marks
                )
            ).to_payload()
        if isinstance(req, VerifyRequest):
            ok = self.verify(req.experiment_id, req.step_no, req.step_text, req.scene_json)
            return VerifyResponse(verdict="Y" if ok else "N").to_payload()
        if isinstance(req, PolicyStepRequest):
            actions, done = self.policy_step(req.experiment_id, req.observation)
            return PolicyStepResponse(
                actions=tuple(tuple(float(v) for v in row) for row in actions),
                done=done,
            ).to_payload()
        assert isinstance(req, PolicyResetRequest)
        self.policy_reset(req.experiment_id)
        return PolicyResetResponse().to_payload()


class MockGatewayClient:
    """Typed client facade over a MockGateway for the orchestrator.

    Parses prompter marks and normalizes verdicts exactly like the HTTP
    client, so swapping transports never changes behavior.
    """

    def __init__(self, gateway: MockGateway | None = None):
        self.gateway = gateway or MockGateway()

    def plan(self, experiment_id, task, apparatus, primitive_menu) -> str:
        return self.gateway.plan(experiment_id, task, apparatus, primitive_menu)

    def guideline(self, experiment_id, step_no, step_text, image_b64=None, scene_json=None):
        # keyword forwarding: the two gateway surfaces order these differently
        return self.gateway.guideline(
            experiment_id, step_no, step_text,
            image_b64=image_b64, scene_json=scene_json,
        )

    def visual_prompt(self, experiment_id, step_no, step_text, image_b64=None, scene_json=None):
        return self.gateway.visual_prompt(
            experiment_id, step_no, step_text,
            image_b64=image_b64, scene_json=scene_json,
        )

    def verify(self, experiment_id, step_no, step_text, image_b64=None, scene_json=None) -> bool:
        return self.gateway.verify(
            experiment_id, step_no, step_text,
            image_b64=image_b64, scene_json=scene_json,
        )

    def policy_step(self, experiment_id, observation):
        return self.gateway.policy_step(experiment_id, observation)

    def policy_reset(self, experiment_id) -> None:
        self.gateway.policy_reset(experiment_id)


__all__ = [
    "DEFAULT_ACTION_HORIZON",
    "DEFAULT_POLICY_DONE_TICKS",
    "MockGateway",
    "MockGatewayClient",
    "compute_marks",
    "guideline_text",
    "verify_scene",
]
