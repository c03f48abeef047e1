"""The closed primitive-action plan language.

Plans are lists of lines, one primitive per line, drawn from a fixed menu of
seven verb templates. Slot boundaries are recovered by anchoring on each
template's literal connectives (" from ", " into ", " to ", " into the ",
" in ", "over a flame", "the button of"); the rightmost " until " splits off
the repeat-condition, which only the Pour template carries. Formatting is the
exact inverse: ``parse_primitive(format_primitive(t))`` structurally equals
``t`` for any task expressible in the grammar.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum


class PrimitiveVerb(str, Enum):
    GRASP = "Grasp"
    POUR = "Pour"
    STIR = "Stir"
    TRANSFER = "Transfer"
    DIP = "Dip"
    HEAT = "Heat"
    PRESS = "Press"


#: slot roles per verb, in template order
SLOT_ROLES: dict[PrimitiveVerb, tuple[str, ...]] = {
    PrimitiveVerb.GRASP: ("object",),
    PrimitiveVerb.POUR: ("liquid", "source_container", "dest_container"),
    PrimitiveVerb.STIR: ("mixture",),
    PrimitiveVerb.TRANSFER: ("solid", "source_container", "dest_container"),
    PrimitiveVerb.DIP: ("object", "solution", "container"),
    PrimitiveVerb.HEAT: ("object",),
    PrimitiveVerb.PRESS: ("object",),
}

#: the seven menu templates handed to planners, verbatim
PRIMITIVE_MENU: tuple[str, ...] = (
    "Grasp [rod-like object]",
    "Pour [liquid] from [container] into [container] until [condition]",
    "Stir [mixture]",
    "Transfer [solid] from [container] to [container]",
    "Dip [object] into the [solution] in [container]",
    "Heat [object] over a flame",
    "Press the button of [object]",
)

CONDITION_PREDICATES = (
    "colorless",
    "pink",
    "bubbles",
    "crystals",
    "mist",
    "flame_color",
    "dissolved",
)


class PlanError(ValueError):
    """Base class for plan-language rejections."""


class EmptyLine(PlanError):
    def __init__(self) -> None:
        super().__init__("empty primitive line")


class UnknownVerb(PlanError):
    def __init__(self, word: str):
        super().__init__(f"unknown primitive verb {word!r}")
        self.word = word


class ArityMismatch(PlanError):
    def __init__(self, verb: "PrimitiveVerb", found: int, detail: str = ""):
        expected = len(SLOT_ROLES[verb])
        msg = f"{verb.value} expects {expected} slot(s), recovered {found}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.verb = verb
        self.found = found


class DanglingUntil(PlanError):
    def __init__(self, verb: "PrimitiveVerb"):
        super().__init__(f"'until' is not permitted on {verb.value}")
        self.verb = verb


class NoSteps(PlanError):
    def __init__(self) -> None:
        super().__init__("plan contains no steps")


class PlanParseFailure(PlanError):
    def __init__(self, errors: list[tuple[int, PlanError]]):
        lines = "; ".join(f"line {n}: {e}" for n, e in errors)
        super().__init__(f"plan failed to parse: {lines}")
        self.errors = errors


@dataclass
class Condition:
    """An until-condition: free text plus an optionally bound predicate."""

    text: str
    predicate: str | None = None
    argument: str | None = None
    target: str | None = field(default=None, compare=False)  # container id, bound at run time

    def to_json_dict(self) -> dict:
        doc: dict = {"text": self.text, "predicate": self.predicate}
        if self.argument is not None:
            doc["argument"] = self.argument
        return doc


@dataclass(frozen=True)
class PrimitiveTask:
    verb: PrimitiveVerb
    slots: tuple[tuple[str, str], ...]  # (role, text) in template order
    until: Condition | None = None
    raw_text: str = field(default="", compare=False)

    def slot(self, role: str) -> str:
        for r, text in self.slots:
            if r == role:
                return text
        raise KeyError(role)

    def to_json_dict(self) -> dict:
        return {
            "verb": self.verb.value,
            "slots": [{"role": r, "text": t} for r, t in self.slots],
            "until": self.until.to_json_dict() if self.until else None,
        }


@dataclass(frozen=True)
class Plan:
    steps: tuple[PrimitiveTask, ...]
    source_text: str = field(default="", compare=False)

    def to_json_dict(self) -> dict:
        return {"steps": [s.to_json_dict() for s in self.steps]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class PlanWarning:
    step_index: int  # 1-based
    slot_role: str
    slot_text: str
    message: str


_VERBS_BY_NAME = {v.value.casefold(): v for v in PrimitiveVerb}
_UNTIL_RE = re.compile(r"\suntil(\s|$)", re.IGNORECASE)
_HEAT_SUFFIX_RE = re.compile(r"\s+over\s+a\s+flame\s*$", re.IGNORECASE)
_PRESS_PREFIX_RE = re.compile(r"^the\s+button\s+of\s+", re.IGNORECASE)


def _split_first(text: str, connective: str) -> tuple[str, str] | None:
    m = re.search(rf"\s{connective}\s", text, re.IGNORECASE)
    if m is None:
        return None
    return text[: m.start()].strip(), text[m.end() :].strip()


def _split_last(text: str, connective: str) -> tuple[str, str] | None:
    last = None
    for m in re.finditer(rf"\s{connective}\s", text, re.IGNORECASE):
        last = m
    if last is None:
        return None
    return text[: last.start()].strip(), text[last.end() :].strip()


def parse_primitive(line: str) -> PrimitiveTask:
    """Parse one primitive line into its structured form."""
    text = line.strip()
    if not text:
        raise EmptyLine()
    head, _, rest = text.partition(" ")
    verb = _VERBS_BY_NAME.get(head.casefold())
    if verb is None:
        raise UnknownVerb(head)
    rest = rest.strip()

    until: Condition | None = None
    if verb is not PrimitiveVerb.POUR and _UNTIL_RE.search(text):
        raise DanglingUntil(verb)
    if verb is PrimitiveVerb.POUR:
        if re.search(r"\suntil\s*$", rest, re.IGNORECASE):
            raise ArityMismatch(verb, 3, "empty until-condition")
        split = _split_last(rest, "until")
        if split is not None:
            rest, cond_text = split
            if not cond_text:
                raise ArityMismatch(verb, 3, "empty until-condition")
            until = Condition(text=cond_text)

    slots: list[tuple[str, str]] = []
    roles = SLOT_ROLES[verb]

    if verb in (PrimitiveVerb.GRASP, PrimitiveVerb.STIR):
        if not rest:
            raise ArityMismatch(verb, 0)
        slots.append((roles[0], rest))
    elif verb is PrimitiveVerb.HEAT:
        m = _HEAT_SUFFIX_RE.search(rest)
        if m is None:
            raise ArityMismatch(verb, 0, "missing 'over a flame'")
        obj = rest[: m.start()].strip()
        if not obj:
            raise ArityMismatch(verb, 0)
        slots.append((roles[0], obj))
    elif verb is PrimitiveVerb.PRESS:
        m = _PRESS_PREFIX_RE.match(rest)
        if m is None:
            raise ArityMismatch(verb, 0, "missing 'the button of'")
        obj = rest[m.end() :].strip()
        if not obj:
            raise ArityMismatch(verb, 0)
        slots.append((roles[0], obj))
    elif verb is PrimitiveVerb.POUR:
        first = _split_first(rest, "from")
        if first is None:
            raise ArityMismatch(verb, 1 if rest else 0, "missing 'from'")
        liquid, remainder = first
        second = _split_first(remainder, "into")
        if second is None:
            raise ArityMismatch(verb, 2 if liquid else 1, "missing 'into'")
        source, dest = second
        found = sum(1 for s in (liquid, source, dest) if s)
        if found != 3:
            raise ArityMismatch(verb, found)
        slots.extend(zip(roles, (liquid, source, dest)))
    elif verb is PrimitiveVerb.TRANSFER:
        first = _split_first(rest, "from")
        if first is None:
            raise ArityMismatch(verb, 1 if rest else 0, "missing 'from'")
        solid, remainder = first
        second = _split_first(remainder, "to")
        if second is None:
            raise ArityMismatch(verb, 2 if solid else 1, "missing 'to'")
        source, dest = second
        found = sum(1 for s in (solid, source, dest) if s)
        if found != 3:
            raise ArityMismatch(verb, found)
        slots.extend(zip(roles, (solid, source, dest)))
    else:  # DIP
        first = _split_first(rest, "into\\s+the")
        if first is None:
            raise ArityMismatch(verb, 1 if rest else 0, "missing 'into the'")
        obj, remainder = first
        second = _split_last(remainder, "in")
        if second is None:
            raise ArityMismatch(verb, 2 if obj else 1, "missing 'in'")
        solution, container = second
        found = sum(1 for s in (obj, solution, container) if s)
        if found != 3:
            raise ArityMismatch(verb, found)
        slots.extend(zip(roles, (obj, solution, container)))

    return PrimitiveTask(verb=verb, slots=tuple(slots), until=until, raw_text=line)


def format_primitive(task: PrimitiveTask) -> str:
    """Render a task back to its canonical template line."""
    roles = SLOT_ROLES[task.verb]
    got = tuple(r for r, _ in task.slots)
    if got != roles:
        raise ArityMismatch(task.verb, len(task.slots), f"slot roles {got}")
    if task.until is not None and task.verb is not PrimitiveVerb.POUR:
        raise DanglingUntil(task.verb)
    values = [t for _, t in task.slots]
    verb = task.verb
    if verb is PrimitiveVerb.GRASP:
        line = f"Grasp {values[0]}"
    elif verb is PrimitiveVerb.STIR:
        line = f"Stir {values[0]}"
    elif verb is PrimitiveVerb.HEAT:
        line = f"Heat {values[0]} over a flame"
    elif verb is PrimitiveVerb.PRESS:
        line = f"Press the button of {values[0]}"
    elif verb is PrimitiveVerb.POUR:
        line = f"Pour {values[0]} from {values[1]} into {values[2]}"
        if task.until is not None:
            if not task.until.text.strip():
                raise ArityMismatch(verb, 3, "empty until-condition")
            line += f" until {task.until.text}"
    elif verb is PrimitiveVerb.TRANSFER:
        line = f"Transfer {values[0]} from {values[1]} to {values[2]}"
    else:  # DIP
        line = f"Dip {values[0]} into the {values[1]} in {values[2]}"
    return line


_MARKER_RE = re.compile(r"^\s*(?:[-*•]\s+|\d+[.)]\s+)?")


def parse_plan(block: str) -> Plan:
    """Parse a whole plan, stripping list markers and tolerating blank lines.

    Per-line errors are aggregated into a single PlanParseFailure carrying
    (line_no, error) pairs; a plan with no steps at all raises NoSteps.
    """
    steps: list[PrimitiveTask] = []
    errors: list[tuple[int, PlanError]] = []
    for line_no, raw in enumerate(block.splitlines(), 1):
        stripped = _MARKER_RE.sub("", raw, count=1).strip()
        if not stripped:
            continue
        try:
            steps.append(parse_primitive(stripped))
        except PlanError as exc:
            errors.append((line_no, exc))
    if errors:
        raise PlanParseFailure(errors)
    if not steps:
        raise NoSteps()
    return Plan(steps=tuple(steps), source_text=block)


#: ordered phrase table binding condition text to predicates; first hit wins
_PREDICATE_PHRASES: tuple[tuple[str, str], ...] = (
    ("colorless", "colorless"),
    ("disappear", "colorless"),
    ("becomes clear", "colorless"),
    ("turns clear", "colorless"),
    ("pink", "pink"),
    ("bubbl", "bubbles"),
    ("effervescen", "bubbles"),
    ("crystal", "crystals"),
    ("mist", "mist"),
    ("dissolv", "dissolved"),
    ("flame", "flame_color"),
)

_FLAME_COLOR_WORDS = (
    "blue-green",
    "brick-red",
    "purplish-red",
    "yellow-green",
    "magenta",
    "yellow",
)


def bind_predicate(cond: Condition) -> None:
    """Attach a structured predicate to a condition when its phrasing is known."""
    folded = cond.text.casefold()
    for phrase, predicate in _PREDICATE_PHRASES:
        if phrase in folded:
            cond.predicate = predicate
            if predicate == "flame_color":
                for color in _FLAME_COLOR_WORDS:
                    if color in folded:
                        cond.argument = color
                        break
            return


def _fuzzy_in(slot_text: str, inventory: list[str] | tuple[str, ...]) -> bool:
    folded = slot_text.casefold()
    for item in inventory:
        it = item.casefold()
        if folded in it or it in folded:
            return True
    return False


def validate_plan(plan: Plan, inventory: list[str] | tuple[str, ...]) -> list[PlanWarning]:
    """Warn on slots naming objects absent from the apparatus inventory.

    Matching is fuzzy (case-insensitive substring in either direction), so
    "platinum wire" matches an inventory line "Platinum wire mounted on a
    holder". As a side effect, until-conditions get their predicates bound
    from the known phrase table.
    """
    warnings: list[PlanWarning] = []
    for index, step in enumerate(plan.steps, 1):
        for role, text in step.slots:
            if not _fuzzy_in(text, inventory):
                warnings.append(
                    PlanWarning(
                        step_index=index,
                        slot_role=role,
                        slot_text=text,
                        message=f"step {index}: {role} {text!r} not found in apparatus inventory",
                    )
                )
        if step.until is not None and step.until.predicate is None:
            bind_predicate(step.until)
    return warnings
