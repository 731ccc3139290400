"""Telea-style fast-marching inpainting (flat-fill variant).

Hole pixels are visited in increasing distance from the hole boundary, and
each is set to a weighted mean of the known or already-filled pixels within a
radius. The image-gradient correction of the original method is left out, so
every filled value is a convex combination of its sources.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import GeometryError, NoBoundaryError, ParameterError
from .imagecore import as_mask, as_rgb
from .layering import PipelineConfig

__all__ = [
    "KNOWN",
    "BAND",
    "UNKNOWN",
    "DistanceField",
    "fmm_distance",
    "telea_inpaint",
    "inpaint_background",
]

KNOWN, BAND, UNKNOWN = 0, 1, 2


@dataclass(frozen=True)
class DistanceField:
    t: np.ndarray = field(repr=False)
    state: np.ndarray = field(repr=False)
    # flat indices (row * width + col) of hole pixels in the order they were frozen
    order: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.t.shape


def fmm_distance(hole) -> DistanceField:
    """Arrival time of a unit-speed front started on the known pixels around ``hole``."""
    m = as_mask(hole)
    if m.all():
        raise NoBoundaryError("hole covers the entire image; nothing to march from")
    t, order = _kernels.fmm_march(m)
    state = np.full(m.shape, KNOWN, dtype=np.uint8)
    return DistanceField(t, state, order)


def telea_inpaint(image, hole, radius: float = 5.0) -> np.ndarray:
    if not radius >= 1:
        raise ParameterError(f"inpaint radius must be >= 1, got {radius!r}")
    img = as_rgb(image)
    m = as_mask(hole)
    if m.shape != img.shape[:2]:
        raise GeometryError(f"hole {m.shape} does not match image {img.shape[:2]}")
    if not m.any():
        return img.copy()
    dist = fmm_distance(m)
    return _kernels.telea_fill(img, m, dist.t, dist.order, float(radius))


def inpaint_background(layers, config: PipelineConfig | None = None) -> np.ndarray:
    config = config or PipelineConfig()
    return telea_inpaint(layers.background_with_hole, layers.hole, config.inpaint_radius)
