"""Deterministic schematic rendering of scenes into the four camera views.

Not a physics renderer: containers are filled rectangles in their content
color with a thin outline, and flags paint fixed glyphs (stippled bubble
band, gray mist band, flame triangle, crystal specks). The front view is
canonical; top is its vertical flip; the wrist views are fixed 320x240 crops
upscaled 2x nearest-neighbor. Identical scenes always produce identical
bytes.
"""
from __future__ import annotations

import numpy as np

from ..raster import RasterImage
from .effects import container_color
from .scene import Container, LabScene

VIEWS = ("front", "top", "left_wrist", "right_wrist")

_COLOR_RGB: dict[str, tuple[int, int, int]] = {
    "colorless": (235, 242, 248),
    "white": (250, 250, 250),
    "blue": (40, 80, 220),
    "pale-blue": (150, 190, 235),
    "black": (25, 25, 25),
    "green": (40, 160, 80),
    "pink": (235, 105, 180),
    "gray": (128, 128, 128),
    "red": (200, 60, 40),
    "brown": (120, 75, 40),
    "milky": (240, 240, 228),
    "yellow": (240, 200, 40),
    "blue-green": (0, 160, 150),
    "brick-red": (178, 60, 40),
    "purplish-red": (150, 40, 90),
    "yellow-green": (160, 200, 40),
    "magenta": (220, 40, 180),
}

_OUTLINE = (90, 90, 90)
_FLAME = (240, 150, 40)
_EMPTY_FILL = (255, 255, 255)


def color_rgb(tag: str) -> tuple[int, int, int]:
    return _COLOR_RGB.get(tag, (128, 128, 128))


def _fill_color(container: Container) -> tuple[int, int, int]:
    if not container.contents:
        return _EMPTY_FILL
    return color_rgb(container_color(container))


def _draw_triangle(px: np.ndarray, cx: int, tip_y: int, half: int, height: int, color) -> None:
    h, w = px.shape[:2]
    for dy in range(height):
        y = tip_y + dy
        if not 0 <= y < h:
            continue
        span = (half * dy) // max(height - 1, 1)
        x0, x1 = max(cx - span, 0), min(cx + span, w - 1)
        px[y, x0 : x1 + 1] = color


def _render_container(px: np.ndarray, container: Container) -> None:
    x, y, w, h = container.pose
    px[y : y + h, x : x + w] = _fill_color(container)
    # 1px outline so empty glassware stays visible on the white bench
    px[y, x : x + w] = _OUTLINE
    px[y + h - 1, x : x + w] = _OUTLINE
    px[y : y + h, x] = _OUTLINE
    px[y : y + h, x + w - 1] = _OUTLINE

    flags = container.flags
    if flags.precipitate_color:
        band = max(h // 6, 2)
        px[y + h - 1 - band : y + h - 1, x + 1 : x + w - 1] = color_rgb(flags.precipitate_color)
    if flags.crystals:
        band = max(h // 8, 2)
        region = px[y + h - 1 - band : y + h - 1, x + 1 : x + w - 1]
        region[:, ::3] = (250, 250, 250)
    if flags.bubbles:
        top = y + max(h // 4, 2)
        region = px[top : min(top + max(h // 4, 2), y + h - 1), x + 1 : x + w - 1]
        region[::3, ::3] = (255, 255, 255)
    if flags.mist:
        band = max(h // 5, 2)
        px[max(y - band, 0) : y, x : x + w] = (200, 200, 200)
    if container.kind == "alcohol_lamp":
        _draw_triangle(px, x + w // 2, max(y - h // 3, 0), max(w // 4, 3), max(h // 3, 4), _FLAME)
    if flags.flame_color:
        _draw_triangle(
            px, x + w // 2, max(y - h // 4, 0), max(w // 3, 3), max(h // 4, 4), color_rgb(flags.flame_color)
        )


def render_front(scene: LabScene) -> RasterImage:
    width, height = scene.canvas
    px = np.full((height, width, 3), 255, dtype=np.uint8)
    for container in scene.containers.values():
        if container.kind == "alcohol_lamp" and not scene.lamp_lit:
            x, y, w, h = container.pose
            px[y : y + h, x : x + w] = (235, 235, 235)
            px[y, x : x + w] = _OUTLINE
            px[y + h - 1, x : x + w] = _OUTLINE
            px[y : y + h, x] = _OUTLINE
            px[y : y + h, x + w - 1] = _OUTLINE
            continue
        _render_container(px, container)
    return RasterImage(px)


def _upscale2(crop: np.ndarray) -> np.ndarray:
    return np.repeat(np.repeat(crop, 2, axis=0), 2, axis=1)


def render_view(scene: LabScene, view: str) -> RasterImage:
    """Render one of the four camera views."""
    if view not in VIEWS:
        raise KeyError(f"unknown view {view!r}")
    front = render_front(scene)
    if view == "front":
        return front
    if view == "top":
        return RasterImage(np.flipud(front.pixels))
    px = front.pixels
    h, w = px.shape[:2]
    cy0 = (h - 240) // 2
    if view == "left_wrist":
        crop = px[cy0 : cy0 + 240, 0:320]
    else:
        crop = px[cy0 : cy0 + 240, w - 320 : w]
    return RasterImage(_upscale2(crop))


def render_views(scene: LabScene) -> dict[str, RasterImage]:
    """All four views; the front canvas is rendered once and reused."""
    front = render_front(scene)
    px = front.pixels
    h, w = px.shape[:2]
    cy0 = (h - 240) // 2
    return {
        "front": front,
        "top": RasterImage(np.flipud(px)),
        "left_wrist": RasterImage(_upscale2(px[cy0 : cy0 + 240, 0:320])),
        "right_wrist": RasterImage(_upscale2(px[cy0 : cy0 + 240, w - 320 : w])),
    }
