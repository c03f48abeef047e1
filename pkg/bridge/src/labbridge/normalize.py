"""Turn raw chat-model replies into gateway envelope values.

Chat models rarely answer in the exact shape the prompt demands: verdicts
arrive as "Y\\n" or "Yes, the step...", mark lists come wrapped in prose,
guidelines end in stray whitespace. Each normalizer here extracts the
payload its endpoint needs or raises NormalizationFailure, which the server
answers with status 502 — the reply carried nothing parseable.

Rules, per endpoint:

    plan           the raw reply text, byte for byte
    guideline      whitespace-stripped text; the literal word "None" -> null
    visual_prompt  the first balanced top-level JSON array in the reply,
                   each element checked against the mark shape
    verify         the first non-whitespace character, which must be an
                   uppercase "Y" or "N"
"""
from __future__ import annotations

import json


class NormalizationFailure(Exception):
    """The backend reply carried no payload the endpoint could use."""


_MARK_KINDS = {"point": 2, "box": 4}
_MARK_ROLES = {"grasp_point", "target_point", "region"}


def normalize_plan(reply: str) -> str:
    """Plans pass through untouched; the plan grammar downstream tolerates
    numbering and surrounding whitespace, so rewriting here only risks
    breaking byte-level fixture comparisons."""
    return reply


def normalize_guideline(reply: str) -> str | None:
    text = reply.strip()
    if text == "None":
        return None
    return text


def extract_first_array(reply: str) -> list:
    """Scan for the first position where a balanced JSON array parses.

    Models embed the mark list in prose ("Here are the marks: [...]"), often
    alongside bracketed asides like "[see figure]" that are not JSON; every
    '[' is tried in order and the first that decodes as an array wins.
    """
    decoder = json.JSONDecoder()
    for pos, ch in enumerate(reply):
        if ch != "[":
            continue
        try:
            value, _ = decoder.raw_decode(reply, pos)
        except ValueError:
            continue
        if isinstance(value, list):
            return value
    raise NormalizationFailure("visual_prompt reply carried no JSON array")


def _check_mark(index: int, mark) -> None:
    where = f"mark {index}"
    if not isinstance(mark, dict):
        raise NormalizationFailure(f"{where}: not an object")
    extra = set(mark) - {"type", "coordinates", "role"}
    if extra:
        raise NormalizationFailure(f"{where}: unexpected field {sorted(extra)[0]!r}")
    kind = mark.get("type")
    if kind not in _MARK_KINDS:
        raise NormalizationFailure(f"{where}: type must be 'point' or 'box', got {kind!r}")
    coords = mark.get("coordinates")
    if not isinstance(coords, list) or len(coords) != _MARK_KINDS[kind]:
        raise NormalizationFailure(
            f"{where}: a {kind} needs exactly {_MARK_KINDS[kind]} coordinates"
        )
    for value in coords:
        if isinstance(value, bool) or not isinstance(value, int):
            raise NormalizationFailure(f"{where}: coordinates must be integers")
    if "role" in mark and mark["role"] not in _MARK_ROLES:
        raise NormalizationFailure(f"{where}: unknown role {mark['role']!r}")


def normalize_marks(reply: str) -> list:
    marks = extract_first_array(reply)
    for index, mark in enumerate(marks):
        _check_mark(index, mark)
    return marks


def normalize_verify(reply: str) -> str:
    stripped = reply.strip()
    if not stripped:
        raise NormalizationFailure("verify reply was empty")
    first = stripped[0]
    if first in ("Y", "N"):
        return first
    head = stripped[:40]
    raise NormalizationFailure(f"verify reply did not start with Y or N: {head!r}")
