"""Policy-facing instruction templates and observation assembly.

Each primitive verb ships five "prompted" instruction variants (phrased around
a marked reference image) and three plain variants (no image references).
Template texts carry ``[COLOR]`` slots; composition substitutes the drawing
color of whichever mark kind the surrounding phrase names — blue for boxes,
amber for grasp points, red for target points.

Variant choice is a deterministic function of (seed, step index), so the same
experiment always issues identical instruction text.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .grammar import PrimitiveTask, PrimitiveVerb
from .marks import VisualMark, render_marks, validate_marks
from .raster import RasterImage
from .rng import make_rng
from .simlab.render import VIEWS

PROPRIO_DIM = 14

# Stream tag separating instruction picks from other consumers of the seed.
_TEMPLATE_STREAM = 1045


class ObservationError(ValueError):
    """A policy observation could not be assembled."""


class MissingView(ObservationError):
    def __init__(self, name: str):
        super().__init__(f"missing camera view {name!r}")
        self.name = name


class BadProprio(ObservationError):
    def __init__(self, n: int):
        super().__init__(f"proprioception must have {PROPRIO_DIM} values, got {n}")
        self.n = n


@dataclass(frozen=True)
class PromptedImage:
    """A front view plus the mark overlay drawn onto it."""

    base: RasterImage
    marks: tuple[VisualMark, ...]
    rendered: RasterImage

    @classmethod
    def build(cls, base: RasterImage, marks: Sequence[VisualMark]) -> "PromptedImage":
        marks = tuple(marks)
        validate_marks(marks, base.width, base.height)
        return cls(base=base, marks=marks, rendered=render_marks(base, marks))


@dataclass(frozen=True)
class PolicyObservation:
    views: Mapping[str, RasterImage]
    proprio: tuple[float, ...]
    instruction: str
    prompted: PromptedImage | None = None
    prompt_flag: bool = field(default=False)

    def __post_init__(self):
        for name in VIEWS:
            if name not in self.views:
                raise MissingView(name)
        if len(self.proprio) != PROPRIO_DIM:
            raise BadProprio(len(self.proprio))
        if self.prompt_flag != (self.prompted is not None):
            raise ObservationError("prompt_flag must mirror the presence of the prompted image")


BOX_COLOR_WORD = "blue"
GRASP_POINT_COLOR_WORD = "amber"
TARGET_POINT_COLOR_WORD = "red"

_POINT_COLOR_WORD = {
    PrimitiveVerb.GRASP: GRASP_POINT_COLOR_WORD,
    PrimitiveVerb.POUR: GRASP_POINT_COLOR_WORD,
    PrimitiveVerb.HEAT: TARGET_POINT_COLOR_WORD,
    PrimitiveVerb.DIP: TARGET_POINT_COLOR_WORD,
    PrimitiveVerb.STIR: TARGET_POINT_COLOR_WORD,
    PrimitiveVerb.TRANSFER: TARGET_POINT_COLOR_WORD,
    PrimitiveVerb.PRESS: TARGET_POINT_COLOR_WORD,
}

PROMPTED_TEMPLATES: dict[PrimitiveVerb, tuple[str, ...]] = {
    PrimitiveVerb.GRASP: (
        "In the image input, the last image is used as a reference image, with the [COLOR]"
        " target point being the location where the robotic gripper grasps the glass rod."
        " The [COLOR] bounding box surrounds the glass rod, indicating the region of interest."
        " Using the right arm of the robotic arm, carefully grasp the glass rod and lift it gently.",
        "In the last image of the input sequence, the [COLOR] target point indicates the"
        " designated grasp location on the glass rod. The [COLOR] bounding box encloses the"
        " glass rod, marking the region to focus on. Using the right manipulator, precisely"
        " approach and grasp the rod at the indicated point, ensuring a secure and stable hold.",
        "Refer to the last image provided, in which the [COLOR] target point specifies the"
        " grasp location on the glass rod. The [COLOR] bounding box highlights the glass rod's"
        " region of interest. The right robotic arm should be used to perform a precise and"
        " stable grasp at the indicated position.",
        "As shown in the final image input, the [COLOR] point represents the target location"
        " for grasping the glass rod. The [COLOR] bounding box defines the region of the glass"
        " rod. Utilize the right arm of the robot to perform a careful and firm grasp at this"
        " location, ensuring the rod is securely held.",
        "The last image in the input sequence provides the reference for grasping, with the"
        " [COLOR] point indicating the target position on the glass rod. The [COLOR] bounding"
        " box clearly identifies the region of the glass rod. The task is to control the"
        " robot's right arm to grasp the rod at this point and maintain a stable grip.",
    ),
    PrimitiveVerb.HEAT: (
        "In the image input, the last image is used as a reference image, with the [COLOR]"
        " target point for the platinum wire head to extend into the alcohol burner flame."
        " Using the right robotic arm, hold the platinum wire and carefully extend it into"
        " the outer flame of the Bunsen burner until it glows red-hot.",
        "The final image in the input serves as a reference, with the [COLOR] marker"
        " specifying the target location for introducing the platinum wire tip into the"
        " Bunsen burner flame. The right robotic manipulator is used to securely hold the"
        " wire and extend it into the outer flame region until red-hot.",
        "Refer to the last input image, where the [COLOR] target point marks the location for"
        " inserting the platinum wire tip into the flame of the Bunsen burner. The robot's"
        " right arm should be used to hold the wire and steadily guide it into the outer"
        " flame until visible incandescence is achieved.",
        "In the last image provided, the [COLOR] point indicates the desired position for"
        " extending the platinum wire tip into the Bunsen burner flame. The right robotic arm"
        " is tasked with holding the wire and positioning it within the outer flame zone"
        " until it becomes red-hot.",
        "The [COLOR] marker in the final input image denotes the target region for"
        " positioning the platinum wire head within the Bunsen burner flame. The right arm of"
        " the robot is employed to grasp and insert the wire into the outer flame carefully,"
        " heating it until it glows red.",
    ),
    PrimitiveVerb.DIP: (
        "In the last image, the [COLOR] bounding box surrounds the beaker and the [COLOR]"
        " target point marks the liquid level inside it. Using the right robotic arm,"
        " carefully grasp the platinum wire and gently extend it into the beaker to dip it"
        " into the liquid.",
        "The last image in the input sequence serves as a reference, where the [COLOR]"
        " bounding box outlines the beaker and the [COLOR] marker denotes the target liquid"
        " level inside it. The right robotic arm is used to securely hold the platinum wire"
        " and gently insert it into the liquid up to the specified depth.",
        "As shown in the final input image, the [COLOR] bounding box highlights the beaker"
        " and the [COLOR] target point indicates the liquid surface level. The robot's right"
        " manipulator is employed to grasp the platinum wire and immerse it into the liquid"
        " to the designated level.",
        "Refer to the last image in the input, where the [COLOR] bounding box encloses the"
        " beaker and the [COLOR] target point represents the desired immersion depth"
        " corresponding to the liquid level. The platinum wire is held by the right robotic"
        " arm and is carefully dipped into the liquid accordingly.",
        "In the final image of the input, the [COLOR] bounding box frames the beaker and the"
        " [COLOR] point indicates the liquid level to which the platinum wire should be"
        " submerged. The right robotic arm is used to delicately lower the wire into the"
        " beaker until the required depth is reached.",
    ),
    PrimitiveVerb.POUR: (
        "In the last image, the [COLOR] bounding box around the left beaker and the [COLOR]"
        " bounding box around the right beaker are shown, each containing its respective"
        " [COLOR] grasp point (one on the left beaker, one on the right). The [COLOR] point"
        " on the right beaker indicates the position for the robotic arm to grasp the beaker."
        " With the left arm holding the left beaker (at the [COLOR] left-beaker point inside"
        " its [COLOR] bounding box) and the right arm grasping the right beaker (at the"
        " [COLOR] right-beaker point inside its [COLOR] bounding box), carefully pour the"
        " liquid from the right beaker into the left until fully transferred.",
        "The last image serves as a reference, showing the [COLOR] bounding box around the"
        " left beaker, the [COLOR] bounding box around the right beaker, and their"
        " corresponding [COLOR] grasp points. The [COLOR] marker on the right beaker denotes"
        " the designated grasp location. The robotic system uses its left arm to stabilize"
        " the left beaker (holding it at the [COLOR] left-beaker point) while the right arm"
        " lifts and tilts the right beaker (grasped at the [COLOR] right-beaker point) to"
        " transfer the liquid completely into the left one.",
        "In the final image, you can see the [COLOR] bounding box around the left beaker and"
        " the [COLOR] bounding box around the right beaker, each highlighting a [COLOR] grasp"
        " point. The [COLOR] point on the right beaker indicates where to grasp. The robot"
        " uses its left manipulator to hold the left beaker steady (at its [COLOR] point)"
        " while the right manipulator grasps the right beaker (at the [COLOR] point) and"
        " pours its contents into the left until the transfer is complete.",
        "Refer to the last image, which shows a [COLOR] bounding box around the left beaker"
        " and a [COLOR] bounding box around the right beaker, each with an associated [COLOR]"
        " point. The [COLOR] marker on the right beaker identifies the designated grasp"
        " position. The dual-arm system coordinates both manipulators - left for stabilizing"
        " the receiving beaker (at the [COLOR] left-beaker point) and right for pouring (at"
        " the [COLOR] right-beaker point) - to execute a complete liquid transfer.",
        "In the final image of the input, the [COLOR] bounding box around each beaker and"
        " their corresponding [COLOR] grasp points are displayed (one on the left, one on the"
        " right). The [COLOR] point on the right beaker indicates where to grasp. The robot"
        " is instructed to use its left arm to hold the left beaker steady (at the [COLOR]"
        " left-beaker point) and its right arm to grasp the right beaker (at the [COLOR]"
        " right-beaker point), then carefully pour the liquid into the left beaker until the"
        " transfer is complete.",
    ),
    PrimitiveVerb.STIR: (
        "In the last image, the [COLOR] bounding box highlights the beaker. Use the right arm"
        " to grasp the spatula and stir inside that box.",
        "The final image shows a [COLOR] box around the beaker. Command the right arm to pick"
        " up the spatula and stir within this box.",
        "In the last frame, a [COLOR] bounding box encloses the beaker. Have the right"
        " manipulator grasp the spatula and stir inside that region.",
        "Referencing the last image, you'll see a [COLOR] box around the beaker. Instruct the"
        " right arm to hold the spatula and stir within the boxed area.",
        "In the final image, a single [COLOR] bounding box marks the beaker. Use the right"
        " arm to grasp the spatula and stir inside the box.",
    ),
    PrimitiveVerb.TRANSFER: (
        "In the last image, the [COLOR] boxes highlight the left (solid) and right (liquid)"
        " cups, each with a [COLOR] point. The left [COLOR] point is where to scoop solid;"
        " the right [COLOR] point marks the liquid surface. Use the right arm to grasp the"
        " spatula, scoop at the left cup's [COLOR] point, and pour into the right cup's"
        " [COLOR] point.",
        "The last image shows [COLOR] boxes around both cups and [COLOR] markers for scoop"
        " and pour points - the left for solid, the right for liquid. With the right arm,"
        " grasp the spatula, scoop at the left [COLOR] point, then deposit into the right"
        " [COLOR] point.",
        "In the final image, two [COLOR] boxes enclose the cups, each with a [COLOR] point:"
        " left for scooping solid, right for the liquid level. The right manipulator holds"
        " the spatula, scoops at the left [COLOR] point, and pours at the right [COLOR] point.",
        "Refer to the last image's [COLOR] boxes and [COLOR] points - left at the solid's"
        " scoop location, right at the liquid level. The right arm grabs the spatula, scoops"
        " at the left [COLOR] point, and delivers into the right [COLOR] point.",
        "In the final image, [COLOR] boxes and points mark the scoop (left) and pour (right)"
        " locations. Use the right arm to pick up the spatula, scoop at the left [COLOR]"
        " point, and transfer into the right [COLOR] point.",
    ),
    PrimitiveVerb.PRESS: (
        "In the image input, the last image is used as a reference image, with the [COLOR]"
        " target point indicating the location of the switch. Using the right arm of the"
        " robotic arm, carefully extend to the red switch and flick it to the left to turn"
        " it on.",
        "In the final image of the input, the [COLOR] target point indicates the location of"
        " the switch. Using the right robotic arm, the system carefully extends toward the"
        " switch and flicks it to the left to activate it.",
        "The last image in the input sequence serves as a reference, where the [COLOR] marker"
        " denotes the switch position. The right manipulator is employed to approach the"
        " switch and toggle it leftward to turn it on.",
        "Refer to the last image in the input, where the [COLOR] point marks the switch"
        " location. The robot's right arm is tasked with extending to the switch and flipping"
        " it to the left to power it on.",
        "In the final reference image, the [COLOR] marker identifies the location of the"
        " switch. The robotic system extends its right arm to engage the switch by flicking"
        " it to the left, thereby switching it on.",
    ),
}

PLAIN_TEMPLATES: dict[PrimitiveVerb, tuple[str, ...]] = {
    PrimitiveVerb.GRASP: (
        "Use the right arm to carefully grasp the glass rod and lift it gently.",
        "Pick up the glass rod with the right gripper and hold it steady.",
        "Grasp the glass rod with the right arm and keep a stable hold.",
    ),
    PrimitiveVerb.HEAT: (
        "Hold the platinum wire with the right arm and extend it into the outer flame until"
        " it glows red-hot.",
        "Move the platinum wire into the outer flame with the right arm and heat it until"
        " incandescent.",
        "Using the right arm, keep the platinum wire in the outer flame until it glows red.",
    ),
    PrimitiveVerb.DIP: (
        "Hold the platinum wire with the right arm and dip it into the liquid in the beaker.",
        "Lower the platinum wire into the beaker with the right arm until it enters the liquid.",
        "Using the right arm, insert the platinum wire into the solution in the beaker.",
    ),
    PrimitiveVerb.POUR: (
        "Hold the left beaker steady with the left arm, grasp the right beaker with the"
        " right arm, and pour the liquid into the left beaker.",
        "With the left arm stabilizing the receiving beaker, use the right arm to tilt the"
        " other beaker and pour the liquid across.",
        "Use both arms to pour the liquid from the right beaker into the left beaker until"
        " the transfer is complete.",
    ),
    PrimitiveVerb.STIR: (
        "Use the right arm to grasp the stirring rod and stir the solution in the beaker.",
        "Stir the solution in the beaker with the right arm using a steady circular motion.",
        "Hold the stirring rod with the right arm and stir the beaker's contents evenly.",
    ),
    PrimitiveVerb.TRANSFER: (
        "Use the right arm to grasp the spatula, scoop the solid from the left cup, and"
        " deposit it into the right cup.",
        "With the right arm, scoop the solid with the spatula and transfer it into the"
        " liquid cup.",
        "Grasp the spatula with the right arm, take up the solid, and pour it into the"
        " other cup.",
    ),
    PrimitiveVerb.PRESS: (
        "Use the right arm to extend to the switch and flick it to the left to turn it on.",
        "Reach the switch with the right arm and toggle it leftward to activate it.",
        "With the right arm, press the switch by flicking it to the left.",
    ),
}

_COLOR_SLOT = re.compile(r"\[COLOR\]")
_BOX_WORD = re.compile(r"box", re.IGNORECASE)
_POINT_WORD = re.compile(r"point|marker", re.IGNORECASE)


def substitute_colors(text: str, verb: PrimitiveVerb) -> str:
    """Replace each [COLOR] slot with the drawing color of the mark kind the
    following phrase names: box wording gets blue, point/marker wording gets
    the verb's point color (amber grasp points, red target points)."""
    point_word = _POINT_COLOR_WORD[verb]

    def repl(m: re.Match) -> str:
        tail = text[m.end():]
        box = _BOX_WORD.search(tail)
        point = _POINT_WORD.search(tail)
        if box is not None and (point is None or box.start() < point.start()):
            return BOX_COLOR_WORD
        return point_word

    return _COLOR_SLOT.sub(repl, text)


def template_bank(verb: PrimitiveVerb, prompted: bool) -> tuple[str, ...]:
    return PROMPTED_TEMPLATES[verb] if prompted else PLAIN_TEMPLATES[verb]


def pick_instruction(verb: PrimitiveVerb, prompted: bool, seed: int, step_index: int) -> str:
    bank = template_bank(verb, prompted)
    rng = make_rng(seed, step_index, _TEMPLATE_STREAM)
    variant = int(rng.integers(len(bank)))
    return substitute_colors(bank[variant], verb)


def compose_observation(
    scene_views: Mapping[str, RasterImage],
    proprio: Sequence[float],
    step: PrimitiveTask,
    prompted: PromptedImage | None,
    *,
    seed: int,
    step_index: int,
) -> PolicyObservation:
    """Assemble the observation handed to the policy for one primitive."""
    views = {}
    for name in VIEWS:
        if name not in scene_views:
            raise MissingView(name)
        views[name] = scene_views[name]
    vec = tuple(float(x) for x in proprio)
    if len(vec) != PROPRIO_DIM:
        raise BadProprio(len(vec))
    instruction = pick_instruction(step.verb, prompted is not None, seed, step_index)
    return PolicyObservation(
        views=views,
        proprio=vec,
        instruction=instruction,
        prompted=prompted,
        prompt_flag=prompted is not None,
    )
