"""Deterministic rule-based wet-lab simulator: scenes, substances, outcome
rubric, reaction effects, schematic rendering, and task fixtures."""
from .substances import (
    FLAME_COLORS,
    REGISTRY as SPECIES_REGISTRY,
    NoFlameEntry,
    SpeciesInfo,
    UnknownSpecies,
    find_species_in_text,
    flame_color_of,
)
from .rubric import (
    RUBRIC,
    VALID_SCORES,
    BadDistribution,
    CalibrationError,
    OutcomeDistribution,
    RubricCategory,
    RubricOutcome,
    UnknownCategory,
    calibrate,
    categories,
    category_by_id,
    fail_category,
    outcome,
    point_mass,
    sample_outcome,
    success_failure,
    top_category,
)
from .scene import (
    ARMS,
    CANVAS_HEIGHT,
    CANVAS_WIDTH,
    CONTAINER_KINDS,
    MOL_EPS,
    Ambiguity,
    Container,
    LabScene,
    MissingContainer,
    SceneError,
    Substance,
)
from .effects import (
    DEFAULT_PARAMS,
    RuleNotApplicable,
    SimParams,
    UnboundPredicate,
    apply_primitive,
    check_condition,
    container_color,
    hydroxide_excess,
)
from .render import VIEWS, color_rgb, render_front, render_view, render_views
from .fixtures import (
    COMPLETE_TASKS,
    PRIMITIVE_TASKS,
    REGISTRY as TASK_REGISTRY,
    TaskFixture,
    UnknownTask,
    get_fixture,
    init_scene,
)

__all__ = [
    "ARMS",
    "Ambiguity",
    "BadDistribution",
    "CANVAS_HEIGHT",
    "CANVAS_WIDTH",
    "CONTAINER_KINDS",
    "COMPLETE_TASKS",
    "CalibrationError",
    "Container",
    "DEFAULT_PARAMS",
    "FLAME_COLORS",
    "LabScene",
    "MOL_EPS",
    "MissingContainer",
    "NoFlameEntry",
    "OutcomeDistribution",
    "PRIMITIVE_TASKS",
    "RUBRIC",
    "RubricCategory",
    "RubricOutcome",
    "RuleNotApplicable",
    "SPECIES_REGISTRY",
    "SceneError",
    "SimParams",
    "SpeciesInfo",
    "Substance",
    "TASK_REGISTRY",
    "TaskFixture",
    "UnboundPredicate",
    "UnknownCategory",
    "UnknownSpecies",
    "UnknownTask",
    "VALID_SCORES",
    "VIEWS",
    "apply_primitive",
    "calibrate",
    "categories",
    "category_by_id",
    "check_condition",
    "color_rgb",
    "container_color",
    "fail_category",
    "find_species_in_text",
    "flame_color_of",
    "get_fixture",
    "hydroxide_excess",
    "init_scene",
    "outcome",
    "point_mass",
    "render_front",
    "render_view",
    "render_views",
    "sample_outcome",
    "success_failure",
    "top_category",
]
