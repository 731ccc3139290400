"""Speed model and frame rendering.

Foreground and background each follow an arithmetic offset sequence
``x_k = x_1 + (k - 1) * c``. For left/right movements the offsets are pixel
translations along x (rounded to whole pixels per frame); for zoom-in they are
percentage points of magnification about the image center. Frames are cropped
to the viewport that stays covered by the moved background in every frame.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, ParameterError
from .imagecore import alpha_composite, as_rgb, as_rgba, scale_about_center

__all__ = [
    "Movement",
    "MotionSpec",
    "Transform",
    "Viewport",
    "FrameSequence",
    "offset_sequence",
    "frame_transforms",
    "render_frame",
    "compute_viewport",
    "generate_sequence",
]


class Movement(enum.Enum):
    ZOOM_IN = "zoomin"
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class MotionSpec:
    movement: Movement = Movement.LEFT
    n: int = 30
    fore_1: float = 0.0
    back_1: float = 0.0
    c_fore: float = 4.0
    c_back: float = 1.0

    def __post_init__(self):
        if not isinstance(self.movement, Movement):
            object.__setattr__(self, "movement", Movement(self.movement))
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"frame count must be an integer >= 1, got {self.n!r}")
        if abs(self.c_fore) < abs(self.c_back):
            raise ParameterError(
                f"foreground increment |{self.c_fore}| must not be smaller than background |{self.c_back}|"
            )


@dataclass(frozen=True)
class Transform:
    """Integer translation ``(dx, dy)`` or a zoom ``scale`` about the image center."""

    dx: int = 0
    dy: int = 0
    scale: float = 1.0

    @property
    def is_identity(self) -> bool:
        return self.dx == 0 and self.dy == 0 and self.scale == 1.0


@dataclass(frozen=True)
class Viewport:
    x: int
    y: int
    width: int
    height: int


@dataclass(frozen=True)
class FrameSequence:
    frames: list = field(repr=False)
    offsets: list
    spec: MotionSpec
    viewport: Viewport


def offset_sequence(x1: float, c: float, n: int) -> list[float]:
    if int(n) != n or n < 1:
        raise ParameterError(f"sequence length must be an integer >= 1, got {n!r}")
    return [x1 + (k - 1) * c for k in range(1, int(n) + 1)]


def _round(x: float) -> int:
    return math.floor(x + 0.5)


def _transform(movement: Movement, offset: float) -> Transform:
    if movement is Movement.LEFT:
        return Transform(dx=-_round(offset))
    if movement is Movement.RIGHT:
        return Transform(dx=_round(offset))
    return Transform(scale=1.0 + offset / 100.0)


def frame_transforms(spec: MotionSpec, k: int, image_size: tuple[int, int] | None = None) -> tuple[Transform, Transform]:
    """(foreground, background) transforms for 0-based frame ``k``."""
    if int(k) != k or not 0 <= k < spec.n:
        raise ParameterError(f"frame index {k!r} outside [0, {spec.n})")
    fore = spec.fore_1 + k * spec.c_fore
    back = spec.back_1 + k * spec.c_back
    return _transform(spec.movement, fore), _transform(spec.movement, back)


def _valid_region(t: Transform, w: int, h: int) -> tuple[int, int, int, int]:
    """Half-open (x0, y0, x1, y1) still covered by the image after ``t``."""
    if t.scale >= 1.0:
        x0, x1 = 0, w
        y0, y1 = 0, h
    else:
        cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
        x0 = math.ceil(cx - cx * t.scale)
        x1 = math.floor(cx + (w - 1 - cx) * t.scale) + 1
        y0 = math.ceil(cy - cy * t.scale)
        y1 = math.floor(cy + (h - 1 - cy) * t.scale) + 1
    return (max(x0 + t.dx, 0), max(y0 + t.dy, 0), min(x1 + t.dx, w), min(y1 + t.dy, h))


def render_frame(foreground, background, transforms: tuple[Transform, Transform], viewport: Viewport | None = None) -> np.ndarray:
    fg = as_rgba(foreground)
    bg = as_rgb(background)
    if fg.shape[:2] != bg.shape[:2]:
        raise GeometryError(f"foreground {fg.shape[:2]} and background {bg.shape[:2]} differ in size")
    h, w = bg.shape[:2]
    fore_t, back_t = transforms
    if viewport is None:
        viewport = Viewport(0, 0, w, h)
    vx0, vy0 = viewport.x, viewport.y
    vx1, vy1 = vx0 + viewport.width, vy0 + viewport.height
    x0, y0, x1, y1 = _valid_region(back_t, w, h)
    if viewport.width < 1 or viewport.height < 1 or vx0 < x0 or vy0 < y0 or vx1 > x1 or vy1 > y1:
        raise GeometryError(
            f"viewport {viewport} exceeds the valid background area x[{x0},{x1}) y[{y0},{y1})"
        )

    moved = scale_about_center(bg, back_t.scale) if back_t.scale != 1.0 else bg
    canvas = np.zeros_like(bg)
    canvas = alpha_composite(canvas, np.dstack([moved, np.full((h, w), 255, np.uint8)]), (back_t.dx, back_t.dy))

    layer = scale_about_center(fg, fore_t.scale) if fore_t.scale != 1.0 else fg
    frame = alpha_composite(canvas, layer, (fore_t.dx, fore_t.dy))
    return frame[vy0:vy1, vx0:vx1].copy()


def compute_viewport(spec: MotionSpec, size: tuple[int, int]) -> Viewport:
    """Largest rectangle covered by the moved background in every frame of ``spec``."""
    w, h = size
    x0, y0, x1, y1 = 0, 0, w, h
    for k in range(spec.n):
        back_t = frame_transforms(spec, k)[1]
        if back_t.scale <= 0:
            raise GeometryError(f"frame {k}: background zoom factor {back_t.scale} is not positive")
        a, b, c, d = _valid_region(back_t, w, h)
        x0, y0, x1, y1 = max(x0, a), max(y0, b), min(x1, c), min(y1, d)
    if x1 <= x0 or y1 <= y0:
        back = offset_sequence(spec.back_1, spec.c_back, spec.n)
        bound = max(abs(b) for b in back)
        raise GeometryError(
            f"background offsets up to {bound:g} leave no common viewport in a {w}x{h} image"
        )
    return Viewport(x0, y0, x1 - x0, y1 - y0)


def generate_sequence(layers, inpainted_bg, spec: MotionSpec) -> FrameSequence:
    bg = as_rgb(inpainted_bg)
    fg = as_rgba(layers.foreground)
    if fg.shape[:2] != bg.shape[:2]:
        raise GeometryError(f"layers {fg.shape[:2]} and background {bg.shape[:2]} differ in size")
    h, w = bg.shape[:2]
    viewport = compute_viewport(spec, (w, h))
    fore = offset_sequence(spec.fore_1, spec.c_fore, spec.n)
    back = offset_sequence(spec.back_1, spec.c_back, spec.n)
    frames = [render_frame(fg, bg, frame_transforms(spec, k), viewport) for k in range(spec.n)]
    return FrameSequence(frames, list(zip(fore, back)), spec, viewport)
