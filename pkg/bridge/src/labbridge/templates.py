"""Prompt templates for the four gateway roles.

Each template is plain text with literal substitution slots. Slots are
replaced with str.replace, never str.format, because the texts themselves
are full of brackets that must survive verbatim ("until [condition]", the
mark-JSON example). Only the slots listed in REQUIRED_PLACEHOLDERS are ever
substituted; any other bracketed text passes through untouched.

Roles and their slots:

    plan           [TASK] [APPARATUS] [MENU]
    guideline      [NUMBER] [PRIMITIVE]
    visual_prompt  [NUMBER] [PRIMITIVE]
    verify         [NUMBER] [PRIMITIVE]

[APPARATUS] and [MENU] render as dash-bulleted lists, one item per line,
from the request's apparatus and primitive_menu fields.
"""
from __future__ import annotations

from typing import Mapping

ROLES = ("plan", "guideline", "visual_prompt", "verify")

REQUIRED_PLACEHOLDERS: dict[str, tuple[str, ...]] = {
    "plan": ("[TASK]", "[APPARATUS]", "[MENU]"),
    "guideline": ("[NUMBER]", "[PRIMITIVE]"),
    "visual_prompt": ("[NUMBER]", "[PRIMITIVE]"),
    "verify": ("[NUMBER]", "[PRIMITIVE]"),
}

PLAN_TEMPLATE = """\
You are a lab assistant tasked with [TASK] using the materials shown in the image. The items, from left to right, are:

[APPARATUS]

Task: [TASK].

Goal: Provide a step-by-step list of primitives (simple lab actions) required to carry out this reaction safely and correctly using the available materials.

Output Format: Directly return a list of primitive actions only containing the following steps without any explanations. If given until [condition] sentence, the robot will repeat the operation until the condition is achieved:

[MENU]"""

GUIDELINE_TEMPLATE = (
    "I am doing experiment using robot arms. Regarding to step [NUMBER], "
    "[PRIMITIVE], establish safety and standardization guidelines necessary "
    "for conducting the chemistry experiment for robot arms, such as where "
    "are the items related to this step, where grasp points of robot arm "
    "are, etc. These guidelines should be only related to items mentioned "
    "before. Summarize these in one or two clear sentences. If such "
    "guidelines are not applicable or available, return None."
)

VISUAL_PROMPT_TEMPLATE = (
    "Now, given the image of the current state of experiment, using marked "
    "points/bounding box to create visual prompts for the image in order to "
    "guide the robot to finish step [NUMBER], [PRIMITIVE]. Remember that "
    "only mark the points/bounding box that robot can currently see/operate "
    "in the current state and do not predict future things/items. Return a "
    "list of point/bounding box coordinates in the image of current state "
    'in the format of a list, like [{"type": "box", "coordinates":[xmin, '
    'ymin, xmax, ymax]}, {"type":"point", "coordinates":[x, y]}]. If there '
    "is nothing to return, return an empty list."
)

VERIFY_TEMPLATE = (
    "Judge whether the step [NUMBER], [PRIMITIVE], has successfully "
    "finished from the image provided. If yes, directly return Y, else "
    "return N."
)

DEFAULT_TEMPLATES: dict[str, str] = {
    "plan": PLAN_TEMPLATE,
    "guideline": GUIDELINE_TEMPLATE,
    "visual_prompt": VISUAL_PROMPT_TEMPLATE,
    "verify": VERIFY_TEMPLATE,
}


def _bullets(items) -> str:
    return "\n".join(f"- {item}" for item in items)


def render(endpoint: str, payload: Mapping, templates: Mapping[str, str]) -> str:
    """Render the prompt for one request envelope.

    Substitution order puts caller-supplied text last, so a step named
    "[NUMBER]" cannot corrupt an already-filled slot.
    """
    role = endpoint.lstrip("/")
    template = templates[role]
    if role == "plan":
        text = template.replace("[APPARATUS]", _bullets(payload["apparatus"]))
        text = text.replace("[MENU]", _bullets(payload["primitive_menu"]))
        return text.replace("[TASK]", payload["task"])
    text = template.replace("[NUMBER]", str(payload["step_no"]))
    return text.replace("[PRIMITIVE]", payload["step_text"])
