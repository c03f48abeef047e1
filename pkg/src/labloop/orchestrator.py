"""The dual-loop engine.

Outer loop, per plan step: guideline -> (optional) visual prompt -> inner loop
-> monitor verify, retrying the primitive on an N verdict up to the retry cap.
Until-steps add condition-driven repetition around the whole execute/verify
block: the condition is asked before the first execution (a pre-satisfied
condition skips with zero repetitions) and after every successful one.

Inner loop: the policy runs tick by tick until it reports done, then the
attempt's rubric outcome is sampled; on a failed sample the policy may
immediately re-run once (probability inner_second_attempt_prob), modeling
retry-augmented training behavior.

Everything is deterministic given (config, trial_index): randomness comes from
one substream per trial.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from .grammar import (
    Plan,
    PlanParseFailure,
    PlanWarning,
    PrimitiveTask,
    PrimitiveVerb,
    PRIMITIVE_MENU,
    format_primitive,
    parse_plan,
    validate_plan,
)
from .instructions import PolicyObservation, PromptedImage, compose_observation
from .raster import RasterImage
from .rng import trial_rng
from .simlab.effects import DEFAULT_PARAMS, SimParams, apply_primitive
from .simlab.fixtures import get_fixture, init_scene
from .simlab.render import VIEWS, render_views
from .simlab.rubric import (
    OutcomeDistribution,
    RubricOutcome,
    fail_category,
    outcome as rubric_outcome,
    point_mass,
    sample_outcome,
)
from .simlab.scene import CANVAS_HEIGHT, CANVAS_WIDTH, LabScene
from .gateway.mock import (
    DEFAULT_ACTION_HORIZON,
    DEFAULT_POLICY_DONE_TICKS,
    MockGateway,
    MockGatewayClient,
)

SCHEMA_VERSION = 1

STATUS_SUCCEEDED = "succeeded"
STATUS_RETRY_EXHAUSTED = "retry_exhausted"
STATUS_UNTIL_EXHAUSTED = "until_exhausted"
STATUS_TIMEOUT = "timeout"
STATUS_PLAN_FAILED = "plan_failed"


class OrchestratorError(RuntimeError):
    def __init__(self, message: str, step_index: int, log: "ExperimentLog | None" = None):
        super().__init__(message)
        self.step_index = step_index
        self.log = log


class PolicyTimeout(OrchestratorError):
    pass


class RetryExhausted(OrchestratorError):
    pass


class UntilExhausted(OrchestratorError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    task_id: str
    seed: int
    max_outer_retries: int = 3
    max_until_repetitions: int = 10
    inner_tick_budget: int = 600  # 30 s at the nominal 20 Hz
    inner_second_attempt_prob: float = 0.5
    prompt_enabled: bool = True
    distributions: Mapping[PrimitiveVerb, OutcomeDistribution] | None = None
    params: SimParams = DEFAULT_PARAMS
    lite_views: bool = False
    policy_done_ticks: int = DEFAULT_POLICY_DONE_TICKS
    action_horizon: int = DEFAULT_ACTION_HORIZON
    success_after_retry_counts: bool = True
    forced_categories: tuple[str, ...] = ()
    experiment_id: str = ""

    def __post_init__(self):
        if self.inner_tick_budget < 1:
            raise ValueError("inner_tick_budget must be >= 1")
        if self.max_until_repetitions < 1:
            raise ValueError("max_until_repetitions must be >= 1")
        if self.max_outer_retries < 0:
            raise ValueError("max_outer_retries must be >= 0")
        if not 0.0 <= self.inner_second_attempt_prob <= 1.0:
            raise ValueError("inner_second_attempt_prob must be within [0, 1]")

    def distribution_for(self, verb: PrimitiveVerb) -> OutcomeDistribution:
        if self.distributions and verb in self.distributions:
            return self.distributions[verb]
        return point_mass(verb)

    def to_json_dict(self) -> dict:
        dists = None
        if self.distributions is not None:
            dists = {v.value: list(d.probs) for v, d in self.distributions.items()}
        return {
            "task_id": self.task_id,
            "seed": self.seed,
            "max_outer_retries": self.max_outer_retries,
            "max_until_repetitions": self.max_until_repetitions,
            "inner_tick_budget": self.inner_tick_budget,
            "inner_second_attempt_prob": self.inner_second_attempt_prob,
            "prompt_enabled": self.prompt_enabled,
            "distributions": dists,
            "params": {
                "acid_mol_per_pour": self.params.acid_mol_per_pour,
                "evap_ml_per_press": self.params.evap_ml_per_press,
                "spill_complete_fraction": self.params.spill_complete_fraction,
                "spill_slight_fraction": self.params.spill_slight_fraction,
                "displacement_deposit_mol": self.params.displacement_deposit_mol,
            },
            "lite_views": self.lite_views,
            "policy_done_ticks": self.policy_done_ticks,
            "action_horizon": self.action_horizon,
            "success_after_retry_counts": self.success_after_retry_counts,
            "forced_categories": list(self.forced_categories),
            "experiment_id": self.experiment_id,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "ExperimentConfig":
        dists = None
        if doc.get("distributions") is not None:
            dists = {
                PrimitiveVerb(verb): OutcomeDistribution(PrimitiveVerb(verb), tuple(probs))
                for verb, probs in doc["distributions"].items()
            }
        return cls(
            task_id=doc["task_id"],
            seed=doc["seed"],
            max_outer_retries=doc.get("max_outer_retries", 3),
            max_until_repetitions=doc.get("max_until_repetitions", 10),
            inner_tick_budget=doc.get("inner_tick_budget", 600),
            inner_second_attempt_prob=doc.get("inner_second_attempt_prob", 0.5),
            prompt_enabled=doc.get("prompt_enabled", True),
            distributions=dists,
            params=SimParams(**doc.get("params", {})),
            lite_views=doc.get("lite_views", False),
            policy_done_ticks=doc.get("policy_done_ticks", DEFAULT_POLICY_DONE_TICKS),
            action_horizon=doc.get("action_horizon", DEFAULT_ACTION_HORIZON),
            success_after_retry_counts=doc.get("success_after_retry_counts", True),
            forced_categories=tuple(doc.get("forced_categories", ())),
            experiment_id=doc.get("experiment_id", ""),
        )


@dataclass
class Attempt:
    repetition: int
    category: str
    score: float
    success: bool
    verdict: bool
    ticks: int
    second_attempt: bool

    def to_json_dict(self) -> dict:
        return {
            "repetition": self.repetition,
            "category": self.category,
            "score": self.score,
            "success": self.success,
            "verdict": self.verdict,
            "ticks": self.ticks,
            "second_attempt": self.second_attempt,
        }


@dataclass
class StepTrace:
    step_index: int
    step_text: str
    verb: str
    guideline: str | None = None
    marks: list[dict] | None = None
    instruction: str = ""
    attempts: list[Attempt] = field(default_factory=list)
    until_repetitions: int = 0
    condition_checks: list[bool] = field(default_factory=list)
    final_status: str = STATUS_SUCCEEDED

    @property
    def succeeded(self) -> bool:
        return self.final_status == STATUS_SUCCEEDED

    @property
    def first_attempt_success(self) -> bool:
        return bool(self.attempts) and self.attempts[0].verdict and not self.attempts[0].second_attempt

    @property
    def final_score(self) -> float:
        return self.attempts[-1].score if self.attempts else 0.0

    def to_json_dict(self) -> dict:
        return {
            "step_index": self.step_index,
            "step_text": self.step_text,
            "verb": self.verb,
            "guideline": self.guideline,
            "marks": self.marks,
            "instruction": self.instruction,
            "attempts": [a.to_json_dict() for a in self.attempts],
            "until_repetitions": self.until_repetitions,
            "condition_checks": self.condition_checks,
            "final_status": self.final_status,
        }


@dataclass
class ExperimentLog:
    config: ExperimentConfig
    experiment_id: str
    trial_index: int
    plan_text: str = ""
    plan: Plan | None = None
    plan_errors: list[str] = field(default_factory=list)
    warnings: list[PlanWarning] = field(default_factory=list)
    traces: list[StepTrace] = field(default_factory=list)
    final_status: str = STATUS_SUCCEEDED
    failed_step: int | None = None
    final_scene: LabScene | None = None
    wall_ms: float = 0.0

    @property
    def succeeded(self) -> bool:
        return self.final_status == STATUS_SUCCEEDED

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment_id": self.experiment_id,
            "trial_index": self.trial_index,
            "config": self.config.to_json_dict(),
            "plan_text": self.plan_text,
            "plan": self.plan.to_json_dict() if self.plan else None,
            "plan_errors": list(self.plan_errors),
            "warnings": [
                {
                    "step_index": w.step_index,
                    "slot_role": w.slot_role,
                    "slot_text": w.slot_text,
                    "message": w.message,
                }
                for w in self.warnings
            ],
            "traces": [t.to_json_dict() for t in self.traces],
            "final_status": self.final_status,
            "failed_step": self.failed_step,
            "final_scene": self.final_scene.to_json_dict() if self.final_scene else None,
            "wall_ms": self.wall_ms,
        }

    def to_json(self) -> str:
        import json

        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


_LITE_VIEW_CACHE: dict[str, RasterImage] | None = None


def _lite_views() -> dict[str, RasterImage]:
    global _LITE_VIEW_CACHE
    if _LITE_VIEW_CACHE is None:
        blank = RasterImage.blank(CANVAS_WIDTH, CANVAS_HEIGHT)
        _LITE_VIEW_CACHE = {name: blank for name in VIEWS}
    return _LITE_VIEW_CACHE


def _proprio(step_index: int) -> tuple[float, ...]:
    return tuple(round(0.05 * math.sin(step_index + 0.5 * j), 6) for j in range(14))


def inner_loop(
    step: PrimitiveTask,
    observation: PolicyObservation,
    policy_client,
    experiment_id: str,
    budget: int,
    *,
    sample: Callable[[], RubricOutcome],
    second_attempt_prob: float,
    rng,
    recorder: Callable | None = None,
    step_index: int = 0,
) -> tuple[RubricOutcome, int, bool]:
    """Run the policy to completion (once, or twice after a failed sample),
    within one shared tick budget. Returns (outcome, total ticks, retried?)."""
    if budget < 1:
        raise ValueError("inner tick budget must be >= 1")
    ticks = 0

    def run_once():
        nonlocal ticks
        policy_client.policy_reset(experiment_id)
        while True:
            if ticks >= budget:
                raise PolicyTimeout(
                    f"policy did not report done within {budget} ticks", step_index
                )
            actions, done = policy_client.policy_step(experiment_id, observation)
            ticks += 1
            if recorder is not None:
                recorder(step_index, observation, np.asarray(actions)[0])
            if done:
                return

    run_once()
    result = sample()
    second = False
    if not result.success and float(rng.random()) < second_attempt_prob:
        second = True
        run_once()
        result = sample()
    return result, ticks, second


class _Run:
    """State for one experiment execution."""

    def __init__(self, config, client, scene, trial_index, recorder):
        self.config = config
        self.client = client
        self.scene = scene
        self.trial_index = trial_index
        self.recorder = recorder
        self.rng = trial_rng(config.seed, trial_index)
        self.experiment_id = config.experiment_id or f"{config.task_id}:{config.seed}:{trial_index}"
        self.forced = list(config.forced_categories)

    def views(self) -> dict[str, RasterImage]:
        if self.config.lite_views:
            return dict(_lite_views())
        return render_views(self.scene)

    def sampler(self, verb: PrimitiveVerb) -> Callable[[], RubricOutcome]:
        dist = self.config.distribution_for(verb)
        ambiguous = (
            self.scene.ambiguity is not None
            and verb is PrimitiveVerb.POUR
            and not self.config.prompt_enabled
        )

        def sample() -> RubricOutcome:
            if self.forced:
                return rubric_outcome(verb, self.forced.pop(0))
            if ambiguous:
                k = self.scene.ambiguity.k
                if int(self.rng.integers(k)) != 0:
                    # picked one of the k-1 lookalike containers
                    return rubric_outcome(verb, fail_category(verb))
            return sample_outcome(verb, dist, self.rng)

        return sample

    def execute_step(self, step_index: int, step: PrimitiveTask) -> StepTrace:
        config = self.config
        step_no = step_index + 1
        full_form = format_primitive(step)
        exec_form = format_primitive(replace(step, until=None))
        trace = StepTrace(step_index=step_index, step_text=full_form, verb=step.verb.value)

        scene_json = self.scene.to_json()
        trace.guideline = self.client.guideline(
            self.experiment_id, step_no, full_form, scene_json=scene_json
        )
        prompted = None
        if config.prompt_enabled:
            vmarks = self.client.visual_prompt(
                self.experiment_id, step_no, full_form, scene_json=scene_json
            )
            prompted = PromptedImage.build(self.views()["front"], vmarks)
            trace.marks = [
                {"type": m.kind, "coordinates": list(m.coordinates), "role": m.role}
                for m in vmarks
            ]

        sample = self.sampler(step.verb)

        def build_observation() -> PolicyObservation:
            obs = compose_observation(
                self.views(),
                _proprio(step_index),
                step,
                prompted,
                seed=config.seed,
                step_index=step_index,
            )
            return obs

        def run_execution(repetition: int) -> bool:
            """One execution of the primitive: up to 1 + retries attempts."""
            for _attempt in range(1 + config.max_outer_retries):
                observation = build_observation()
                trace.instruction = observation.instruction
                result, ticks, second = inner_loop(
                    step,
                    observation,
                    self.client,
                    self.experiment_id,
                    config.inner_tick_budget,
                    sample=sample,
                    second_attempt_prob=config.inner_second_attempt_prob,
                    rng=self.rng,
                    recorder=self.recorder,
                    step_index=step_index,
                )
                apply_primitive(self.scene, step, result, config.params)
                verdict = self.client.verify(
                    self.experiment_id, step_no, exec_form, scene_json=self.scene.to_json()
                )
                trace.attempts.append(
                    Attempt(
                        repetition=repetition,
                        category=result.category,
                        score=result.score,
                        success=result.success,
                        verdict=verdict,
                        ticks=ticks,
                        second_attempt=second,
                    )
                )
                if verdict:
                    return True
            return False

        if step.until is None:
            trace.final_status = (
                STATUS_SUCCEEDED if run_execution(0) else STATUS_RETRY_EXHAUSTED
            )
            return trace

        def completion() -> bool:
            verdict = self.client.verify(
                self.experiment_id, step_no, full_form, scene_json=self.scene.to_json()
            )
            trace.condition_checks.append(verdict)
            return verdict

        status = None
        satisfied = completion()  # pre-satisfied condition: skip, zero repetitions
        while not satisfied:
            if trace.until_repetitions >= config.max_until_repetitions:
                status = STATUS_UNTIL_EXHAUSTED
                break
            if not run_execution(trace.until_repetitions):
                status = STATUS_RETRY_EXHAUSTED
                break
            trace.until_repetitions += 1
            satisfied = completion()
        trace.final_status = status or STATUS_SUCCEEDED
        return trace


def run_experiment(
    config: ExperimentConfig,
    client=None,
    scene: LabScene | None = None,
    *,
    trial_index: int = 0,
    recorder: Callable | None = None,
    raise_errors: bool = False,
) -> ExperimentLog:
    """Plan, then execute every step through the dual loop; returns the log.

    With raise_errors=True a non-succeeded run raises the matching error
    (PolicyTimeout / RetryExhausted / UntilExhausted, each carrying .log);
    by default failures are reported in log.final_status.
    """
    started = time.perf_counter()
    if client is None:
        client = MockGatewayClient(
            MockGateway(
                policy_done_ticks=config.policy_done_ticks,
                action_horizon=config.action_horizon,
            )
        )
    if scene is None:
        scene = init_scene(config.task_id, config.seed)
    run = _Run(config, client, scene, trial_index, recorder)
    log = ExperimentLog(
        config=config, experiment_id=run.experiment_id, trial_index=trial_index
    )

    fixture = get_fixture(config.task_id)
    log.plan_text = client.plan(
        run.experiment_id, config.task_id, fixture.apparatus, PRIMITIVE_MENU
    )
    try:
        plan = parse_plan(log.plan_text)
    except PlanParseFailure as exc:
        if raise_errors:
            raise
        log.plan_errors = [f"line {line}: {err}" for line, err in exc.errors]
        log.final_status = STATUS_PLAN_FAILED
        log.final_scene = scene
        log.wall_ms = round((time.perf_counter() - started) * 1000.0, 3)
        return log
    log.plan = plan
    log.warnings = validate_plan(plan, fixture.apparatus)

    status = STATUS_SUCCEEDED
    failed_step = None
    for index, step in enumerate(plan.steps):
        try:
            trace = run.execute_step(index, step)
        except PolicyTimeout as exc:
            trace = StepTrace(
                step_index=index,
                step_text=format_primitive(step),
                verb=step.verb.value,
                final_status=STATUS_TIMEOUT,
            )
            log.traces.append(trace)
            status = STATUS_TIMEOUT
            failed_step = index
            if raise_errors:
                exc.log = _finish(log, scene, status, failed_step, started)
                raise
            break
        log.traces.append(trace)
        if not trace.succeeded:
            status = trace.final_status
            failed_step = index
            break

    _finish(log, scene, status, failed_step, started)
    if raise_errors and not log.succeeded:
        exc_type = {
            STATUS_RETRY_EXHAUSTED: RetryExhausted,
            STATUS_UNTIL_EXHAUSTED: UntilExhausted,
            STATUS_TIMEOUT: PolicyTimeout,
        }.get(log.final_status, OrchestratorError)
        raise exc_type(
            f"experiment ended {log.final_status} at step {failed_step}",
            failed_step if failed_step is not None else -1,
            log,
        )
    return log


def _finish(log: ExperimentLog, scene, status, failed_step, started) -> ExperimentLog:
    log.final_status = status
    log.failed_step = failed_step
    log.final_scene = scene
    log.wall_ms = round((time.perf_counter() - started) * 1000.0, 3)
    return log


def replay_experiment(log_doc: Mapping) -> tuple[bool, list[str], dict]:
    """Re-run a logged experiment from its stored config and compare.

    Returns (identical, differences, fresh log dict). Wall-clock metadata is
    excluded from the comparison; everything else must match byte for byte.
    """
    config = ExperimentConfig.from_json_dict(log_doc["config"])
    fresh = run_experiment(config, trial_index=log_doc.get("trial_index", 0))
    fresh_doc = fresh.to_json_dict()
    diffs = []
    for key in sorted(set(log_doc) | set(fresh_doc)):
        if key in ("wall_ms",):
            continue
        if log_doc.get(key) != fresh_doc.get(key):
            diffs.append(key)
    return (not diffs), diffs, fresh_doc
