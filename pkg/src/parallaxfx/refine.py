"""Foreground cutout and background hole from the nearest mask."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyMaskError
from .imagecore import as_mask, as_rgb, dilate, gaussian_blur, threshold
from .layering import LayerAssignment, PipelineConfig

__all__ = [
    "SceneLayers",
    "refine_foreground_mask",
    "expand_background_hole",
    "split_components",
]


@dataclass(frozen=True)
class SceneLayers:
    foreground: np.ndarray = field(repr=False)  # full-frame RGBA cutout
    background_with_hole: np.ndarray = field(repr=False)
    hole: np.ndarray = field(repr=False)
    refined_mask: np.ndarray = field(repr=False)
    origin: tuple[int, int] = (0, 0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.hole.shape


def _smoothed(mask: np.ndarray, config: PipelineConfig) -> np.ndarray:
    return gaussian_blur(mask.astype(np.float64), config.blur_kernel)


def refine_foreground_mask(mask, config: PipelineConfig | None = None) -> np.ndarray:
    """Blur the mask and threshold it again; masks erased by this are returned unchanged."""
    config = config or PipelineConfig()
    m = as_mask(mask)
    if not m.any():
        raise EmptyMaskError("cannot refine an empty mask")
    refined = threshold(_smoothed(m, config), config.binarize_threshold)
    return refined if refined.any() else m.copy()


def expand_background_hole(mask, config: PipelineConfig | None = None) -> np.ndarray:
    config = config or PipelineConfig()
    return dilate(as_mask(mask), config.dilate_kernel)


def split_components(image, assignment: LayerAssignment, config: PipelineConfig | None = None) -> SceneLayers:
    """Cut the foreground onto a transparent full-frame layer and punch the dilated hole.

    The hole is grown from the unrefined mask. With ``config.feather`` the
    cutout alpha follows the smoothed mask inside the refined region instead
    of being a hard 0/255 step.
    """
    config = config or PipelineConfig()
    img = as_rgb(image)
    mask = as_mask(assignment.foreground_mask)
    if mask.shape != img.shape[:2]:
        raise EmptyMaskError(f"foreground mask {mask.shape} does not match image {img.shape[:2]}")
    if not mask.any():
        raise EmptyMaskError("foreground mask is empty")
    refined = refine_foreground_mask(mask, config)

    fg = np.zeros(img.shape[:2] + (4,), dtype=np.uint8)
    fg[..., :3] = img
    if config.feather:
        alpha = np.floor(_smoothed(mask, config) * 255.0 + 0.5).astype(np.uint8)
        fg[..., 3] = np.where(refined, np.maximum(alpha, 1), 0)
    else:
        fg[..., 3] = np.where(refined, 255, 0)
    # colour is irrelevant where the layer is transparent
    fg[~refined, :3] = 0

    hole = expand_background_hole(mask, config)
    bg = img.copy()
    bg[hole] = 0
    return SceneLayers(fg, bg, hole, refined)
