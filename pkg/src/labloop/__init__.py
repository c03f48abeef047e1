"""labloop: a simulated wet-lab benchmark for instruction-driven manipulation.

The package is a pipeline of small pieces:

* grammar       -- the closed 7-verb primitive language plans are written in
* marks         -- visual prompt marks: parse, validate, draw
* raster        -- tiny binary-PPM image type everything renders into
* simlab        -- deterministic scenes, chemistry rules, rubric, renderer
* instructions  -- per-primitive instruction templates and observations
* gateway       -- wire protocol, mock model backend, HTTP server/client
* orchestrator  -- the dual execution loop (inner attempts, outer retries)
* metrics       -- SR/CR scoring, stepwise cascades, campaigns
* episodes      -- on-disk training episode store and mix generation
"""
from . import episodes, gateway, grammar, instructions, marks, metrics, orchestrator, raster, rng, simlab
from .grammar import (
    Condition,
    Plan,
    PlanError,
    PlanParseFailure,
    PlanWarning,
    PrimitiveTask,
    PrimitiveVerb,
    PRIMITIVE_MENU,
    bind_predicate,
    format_primitive,
    parse_plan,
    parse_primitive,
    validate_plan,
)
from .instructions import PolicyObservation, PromptedImage, compose_observation, pick_instruction
from .marks import VisualMark, parse_marks, render_marks, serialize_marks, validate_marks
from .metrics import (
    CampaignResult,
    TaskReport,
    TrialRecord,
    compliance_rate,
    report_from_logs,
    run_campaign,
    stepwise_evaluate,
    success_rate,
)
from .orchestrator import (
    ExperimentConfig,
    ExperimentLog,
    PolicyTimeout,
    RetryExhausted,
    UntilExhausted,
    replay_experiment,
    run_experiment,
)
from .episodes import EpisodeWriter, generate_training_mix, read_episode, recorder_for
from .raster import PpmError, RasterImage
from .rng import make_rng, trial_rng
from .simlab import (
    LabScene,
    apply_primitive,
    check_condition,
    get_fixture,
    init_scene,
    render_views,
    sample_outcome,
)

__version__ = "0.3.0"

__all__ = [
    "Condition",
    "Plan",
    "PlanError",
    "PlanParseFailure",
    "PlanWarning",
    "PrimitiveTask",
    "PrimitiveVerb",
    "PRIMITIVE_MENU",
    "bind_predicate",
    "format_primitive",
    "parse_plan",
    "parse_primitive",
    "validate_plan",
    "PolicyObservation",
    "PromptedImage",
    "compose_observation",
    "pick_instruction",
    "VisualMark",
    "parse_marks",
    "render_marks",
    "serialize_marks",
    "validate_marks",
    "CampaignResult",
    "TaskReport",
    "TrialRecord",
    "compliance_rate",
    "report_from_logs",
    "run_campaign",
    "stepwise_evaluate",
    "success_rate",
    "ExperimentConfig",
    "ExperimentLog",
    "PolicyTimeout",
    "RetryExhausted",
    "UntilExhausted",
    "replay_experiment",
    "run_experiment",
    "EpisodeWriter",
    "generate_training_mix",
    "read_episode",
    "recorder_for",
    "PpmError",
    "RasterImage",
    "make_rng",
    "trial_rng",
    "LabScene",
    "apply_primitive",
    "check_condition",
    "get_fixture",
    "init_scene",
    "render_views",
    "sample_outcome",
    "episodes",
    "gateway",
    "grammar",
    "instructions",
    "marks",
    "metrics",
    "orchestrator",
    "raster",
    "rng",
    "simlab",
    "__version__",
]
