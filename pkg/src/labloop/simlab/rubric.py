"""Per-verb outcome rubrics: categories, scores, success flags, sampling.

Each primitive has a fixed ordered category table scored on the
{0, 0.25, 0.5, 0.75, 1} ladder. The success flag marks whether the step's
objective was achieved at all (a held rod grasped off-position still counts;
a press that never activated the device does not). Sampling is inverse-CDF
in table order so a given uniform draw always lands in the same category.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..grammar import PrimitiveVerb

VALID_SCORES = (0.0, 0.25, 0.5, 0.75, 1.0)


class UnknownCategory(KeyError):
    pass


class BadDistribution(ValueError):
    pass


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class RubricCategory:
    category: str
    score: float
    success: bool
    label: str


@dataclass(frozen=True)
class RubricOutcome:
    verb: PrimitiveVerb
    category: str
    score: float
    success: bool


RUBRIC: dict[PrimitiveVerb, tuple[RubricCategory, ...]] = {
    PrimitiveVerb.GRASP: (
        RubricCategory("miss", 0.0, False, "Does not grasp the object"),
        RubricCategory("off_position", 0.5, True, "Grasps, but not at the one-third point"),
        RubricCategory("correct", 1.0, True, "Grasps at the correct one-third point"),
    ),
    PrimitiveVerb.HEAT: (
        RubricCategory("no_heat", 0.0, False, "Does not heat"),
        RubricCategory("wrong_spot_stays", 0.25, True, "Heats at the wrong location and does not return"),
        RubricCategory("wrong_spot_returns", 0.5, True, "Heats at the wrong location but returns"),
        RubricCategory("right_spot_stays", 0.75, True, "Heats at the correct location but does not return"),
        RubricCategory("right_spot_returns", 1.0, True, "Heats at the correct location and returns"),
    ),
    PrimitiveVerb.DIP: (
        RubricCategory("miss_beaker", 0.0, False, "Does not reach the container opening"),
        RubricCategory("above_liquid", 0.5, False, "Reaches the container but does not enter the liquid"),
        RubricCategory("inserted", 1.0, True, "Inserts correctly into the liquid"),
    ),
    PrimitiveVerb.POUR: (
        RubricCategory("miss_grasp", 0.0, False, "Fails to grasp the container"),
        RubricCategory("spill_all", 0.25, False, "Grasps but spills completely while pouring"),
        RubricCategory("spill_slight", 0.75, True, "Pours with slight spillage"),
        RubricCategory("controlled", 1.0, True, "Pours with control and no spillage"),
    ),
    PrimitiveVerb.STIR: (
        RubricCategory("no_contact", 0.0, False, "Does not stir or misses the mixture"),
        RubricCategory("uneven", 0.5, True, "Stirs unevenly or strikes the container wall"),
        RubricCategory("correct", 1.0, True, "Stirs smoothly and evenly"),
    ),
    PrimitiveVerb.TRANSFER: (
        RubricCategory("none_moved", 0.0, False, "Does not transfer the solid"),
        RubricCategory("spill_all", 0.25, False, "Transfers but the solid spills out"),
        RubricCategory("spill_slight", 0.75, True, "Transfers with slight spillage"),
        RubricCategory("clean", 1.0, True, "Transfers without spillage"),
    ),
    PrimitiveVerb.PRESS: (
        RubricCategory("no_press", 0.0, False, "Does not press the button"),
        RubricCategory("not_activated", 0.25, False, "Presses but the device does not activate"),
        RubricCategory("too_forceful", 0.5, True, "Presses too forcefully, moving the device"),
        RubricCategory("clean", 1.0, True, "Presses correctly"),
    ),
}


def categories(verb: PrimitiveVerb) -> tuple[RubricCategory, ...]:
    return RUBRIC[verb]


def category_by_id(verb: PrimitiveVerb, category: str) -> RubricCategory:
    for cat in RUBRIC[verb]:
        if cat.category == category:
            return cat
    raise UnknownCategory(f"{verb.value}:{category}")


def outcome(verb: PrimitiveVerb, category: str) -> RubricOutcome:
    cat = category_by_id(verb, category)
    return RubricOutcome(verb=verb, category=cat.category, score=cat.score, success=cat.success)


def fail_category(verb: PrimitiveVerb) -> str:
    return RUBRIC[verb][0].category


def top_category(verb: PrimitiveVerb) -> str:
    return RUBRIC[verb][-1].category


@dataclass(frozen=True)
class OutcomeDistribution:
    """A categorical distribution over one verb's rubric, in table order."""

    verb: PrimitiveVerb
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        cats = RUBRIC[self.verb]
        if len(self.probs) != len(cats):
            raise BadDistribution(
                f"{self.verb.value} has {len(cats)} categories, got {len(self.probs)} probabilities"
            )
        if any(p < 0 for p in self.probs):
            raise BadDistribution("negative probability")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise BadDistribution(f"probabilities sum to {sum(self.probs)!r}, not 1")
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))

    @property
    def success_probability(self) -> float:
        return sum(p for p, c in zip(self.probs, RUBRIC[self.verb]) if c.success)

    @property
    def mean_score(self) -> float:
        return sum(p * c.score for p, c in zip(self.probs, RUBRIC[self.verb]))


def point_mass(verb: PrimitiveVerb, category: str | None = None) -> OutcomeDistribution:
    """All mass on one category (default: the top, score-1 category)."""
    cats = RUBRIC[verb]
    target = category if category is not None else cats[-1].category
    probs = tuple(1.0 if c.category == target else 0.0 for c in cats)
    if sum(probs) != 1.0:
        raise UnknownCategory(f"{verb.value}:{target}")
    return OutcomeDistribution(verb, probs)


def success_failure(verb: PrimitiveVerb, p_success: float) -> OutcomeDistribution:
    """Two-category distribution: top category with probability p, else score 0."""
    if not 0.0 <= p_success <= 1.0:
        raise BadDistribution(f"p_success {p_success} outside [0, 1]")
    cats = RUBRIC[verb]
    probs = [0.0] * len(cats)
    probs[0] = 1.0 - p_success
    probs[-1] = p_success
    return OutcomeDistribution(verb, tuple(probs))


def calibrate(verb: PrimitiveVerb, sr: float, cr: float) -> OutcomeDistribution:
    """Solve a distribution reproducing a measured (success rate, mean score) pair.

    Failure mass sits on the score-0 category plus (if needed) the
    highest-scoring failure category; success mass splits between the
    lowest-scoring success category and the top one.
    """
    if not (0.0 <= sr <= 1.0):
        raise CalibrationError(f"sr {sr} outside [0, 1]")
    cats = RUBRIC[verb]
    succ = [c for c in cats if c.success]
    fail = [c for c in cats if not c.success]
    s_lo, s_hi = succ[0], succ[-1]
    f_hi = fail[-1]
    probs = {c.category: 0.0 for c in cats}

    if s_lo is s_hi:
        probs[s_hi.category] = sr
        succ_score = sr * s_hi.score
    else:
        lo = (sr * s_hi.score - cr) / (s_hi.score - s_lo.score)
        lo = min(max(lo, 0.0), sr)
        probs[s_lo.category] = lo
        probs[s_hi.category] = sr - lo
        succ_score = lo * s_lo.score + (sr - lo) * s_hi.score

    residual = cr - succ_score
    fail_mass = 1.0 - sr
    if f_hi.score > 0 and residual > 1e-12:
        hi = residual / f_hi.score
        if hi > fail_mass + 1e-9:
            raise CalibrationError(f"(sr={sr}, cr={cr}) infeasible for {verb.value}")
        hi = min(hi, fail_mass)
        probs[f_hi.category] = hi
        probs[fail[0].category] = fail_mass - hi
    else:
        probs[fail[0].category] = fail_mass

    dist = OutcomeDistribution(verb, tuple(probs[c.category] for c in cats))
    if abs(dist.mean_score - cr) > 1e-6:
        raise CalibrationError(
            f"(sr={sr}, cr={cr}) infeasible for {verb.value}: nearest mean {dist.mean_score:.4f}"
        )
    return dist


def sample_outcome(verb: PrimitiveVerb, dist: OutcomeDistribution, rng: np.random.Generator) -> RubricOutcome:
    """Inverse-CDF draw in table order; always advances the generator once."""
    if dist.verb is not verb:
        raise BadDistribution(f"distribution is for {dist.verb.value}, not {verb.value}")
    u = float(rng.random())
    cum = 0.0
    cats = RUBRIC[verb]
    for p, cat in zip(dist.probs, cats):
        cum += p
        if u < cum:
            return outcome(verb, cat.category)
    return outcome(verb, cats[-1].category)
