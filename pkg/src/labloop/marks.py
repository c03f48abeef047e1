"""Point and box annotations: the JSON wire shape and deterministic rendering.

Marks arrive as a JSON list like::

    [{"type": "box", "coordinates": [xmin, ymin, xmax, ymax]},
     {"type": "point", "coordinates": [x, y], "role": "grasp_point"}]

Coordinates are integer pixels in image space. Rendering is fully
deterministic: boxes get a 2-pixel pure blue outline, grasp points a filled
amber disc of radius 4, target points the same disc in pure red. Later marks
overdraw earlier ones; the base image is never mutated.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .raster import RasterImage

BOX_COLOR = (0, 0, 255)
GRASP_POINT_COLOR = (192, 144, 0)
TARGET_POINT_COLOR = (255, 0, 0)
POINT_RADIUS = 4
BOX_THICKNESS = 2

ROLES = ("grasp_point", "target_point", "region")


class MarkParseError(ValueError):
    """Base class for mark JSON rejections."""


class MalformedJson(MarkParseError):
    pass


class UnknownMarkType(MarkParseError):
    def __init__(self, text: str):
        super().__init__(f"unknown mark type {text!r}")
        self.text = text


class BadCoordinateCount(MarkParseError):
    def __init__(self, kind: str, n: int):
        expected = 4 if kind == "box" else 2
        super().__init__(f"{kind} mark needs {expected} coordinates, got {n}")
        self.kind = kind
        self.n = n


class UnknownRole(MarkParseError):
    def __init__(self, text: str):
        super().__init__(f"unknown mark role {text!r}")
        self.text = text


@dataclass(frozen=True)
class VisualMark:
    kind: str  # "point" | "box"
    coordinates: tuple[int, ...]
    role: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("point", "box"):
            raise UnknownMarkType(self.kind)
        want = 4 if self.kind == "box" else 2
        if len(self.coordinates) != want:
            raise BadCoordinateCount(self.kind, len(self.coordinates))
        role = self.role or ("region" if self.kind == "box" else "target_point")
        if role not in ROLES:
            raise UnknownRole(role)
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "coordinates", tuple(int(c) for c in self.coordinates))


@dataclass(frozen=True)
class GeometryError:
    index: int
    code: str  # "inverted_box" | "out_of_bounds"
    detail: str


def _coerce_coord(value: object, kind: str, n: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise BadCoordinateCount(kind, n)
    if isinstance(value, float):
        if not value.is_integer():
            raise MalformedJson(f"non-integer coordinate {value!r}")
        value = int(value)
    return int(value)


def parse_marks(text: str) -> list[VisualMark]:
    """Parse the JSON mark list, rejecting anything off-shape."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"marks are not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise MalformedJson("marks must be a JSON list")
    marks: list[VisualMark] = []
    for item in doc:
        if not isinstance(item, dict) or "type" not in item or "coordinates" not in item:
            raise MalformedJson("each mark needs 'type' and 'coordinates'")
        kind = item["type"]
        if kind not in ("point", "box"):
            raise UnknownMarkType(str(kind))
        coords = item["coordinates"]
        if not isinstance(coords, list):
            raise MalformedJson("'coordinates' must be a list")
        want = 4 if kind == "box" else 2
        if len(coords) != want:
            raise BadCoordinateCount(kind, len(coords))
        values = tuple(_coerce_coord(c, kind, len(coords)) for c in coords)
        role = item.get("role", "")
        if not isinstance(role, str):
            raise UnknownRole(str(role))
        marks.append(VisualMark(kind=kind, coordinates=values, role=role))
    return marks


def serialize_marks(marks: list[VisualMark]) -> str:
    """Canonical JSON for a mark list; parse_marks round-trips it."""
    doc = [
        {"type": m.kind, "coordinates": list(m.coordinates), "role": m.role}
        for m in marks
    ]
    return json.dumps(doc, separators=(", ", ": "))


def validate_marks(marks: list[VisualMark], width: int, height: int) -> list[GeometryError]:
    """Geometry checks; an empty list means every mark is drawable."""
    errors: list[GeometryError] = []
    for i, mark in enumerate(marks):
        if mark.kind == "box":
            xmin, ymin, xmax, ymax = mark.coordinates
            if not (xmin < xmax and ymin < ymax):
                errors.append(
                    GeometryError(i, "inverted_box", f"box corners not ordered: {mark.coordinates}")
                )
                continue
            if not (0 <= xmin and xmax < width and 0 <= ymin and ymax < height):
                errors.append(
                    GeometryError(i, "out_of_bounds", f"box {mark.coordinates} exceeds {width}x{height}")
                )
        else:
            x, y = mark.coordinates
            if not (0 <= x < width and 0 <= y < height):
                errors.append(
                    GeometryError(i, "out_of_bounds", f"point ({x}, {y}) exceeds {width}x{height}")
                )
    return errors


def _draw_box(px: np.ndarray, xmin: int, ymin: int, xmax: int, ymax: int) -> None:
    t = BOX_THICKNESS
    px[ymin : min(ymin + t, ymax + 1), xmin : xmax + 1] = BOX_COLOR
    px[max(ymax - t + 1, ymin) : ymax + 1, xmin : xmax + 1] = BOX_COLOR
    px[ymin : ymax + 1, xmin : min(xmin + t, xmax + 1)] = BOX_COLOR
    px[ymin : ymax + 1, max(xmax - t + 1, xmin) : xmax + 1] = BOX_COLOR


def _draw_disc(px: np.ndarray, cx: int, cy: int, color: tuple[int, int, int]) -> None:
    h, w = px.shape[:2]
    r = POINT_RADIUS
    y0, y1 = max(cy - r, 0), min(cy + r, h - 1)
    x0, x1 = max(cx - r, 0), min(cx + r, w - 1)
    if y0 > y1 or x0 > x1:
        return
    yy, xx = np.mgrid[y0 : y1 + 1, x0 : x1 + 1]
    disc = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
    region = px[y0 : y1 + 1, x0 : x1 + 1]
    region[disc] = color


def render_marks(base: RasterImage, marks: list[VisualMark]) -> RasterImage:
    """Draw marks over a copy of ``base``; an empty list yields a byte-identical copy."""
    bad = validate_marks(marks, base.width, base.height)
    if bad:
        raise ValueError(f"unrenderable marks: {bad[0].code} at index {bad[0].index}")
    px = base.mutable_pixels()
    for mark in marks:
        if mark.kind == "box":
            _draw_box(px, *mark.coordinates)
        else:
            color = GRASP_POINT_COLOR if mark.role == "grasp_point" else TARGET_POINT_COLOR
            _draw_disc(px, mark.coordinates[0], mark.coordinates[1], color)
    return RasterImage(px)
