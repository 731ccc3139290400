"""Raster conventions and pixel-level primitives.

Rasters are plain numpy arrays, row-major with shape ``(height, width, ...)``:

* RGB image   -- ``uint8`` of shape ``(h, w, 3)``
* RGBA layer  -- ``uint8`` of shape ``(h, w, 4)``, alpha 0 transparent, 255 opaque
* depth map   -- ``float64`` of shape ``(h, w)``, nearness in [0, 1] (larger = nearer)
* binary mask -- ``bool`` of shape ``(h, w)``
* gray field  -- ``float64`` of shape ``(h, w)`` in [0, 1]

None of the functions here mutate their arguments.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .errors import EmptyMaskError, GeometryError, ParameterError

__all__ = [
    "as_rgb",
    "as_rgba",
    "as_mask",
    "as_field",
    "as_depth",
    "round_half_up",
    "gaussian_kernel",
    "gaussian_blur",
    "dilate",
    "threshold",
    "center_of_mass",
    "alpha_composite",
    "resample_bilinear",
    "scale_about_center",
]


def _check_2d(arr: np.ndarray, what: str) -> None:
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise GeometryError(f"{what} must be a non-empty 2-D array, got shape {arr.shape}")


def as_rgb(image) -> np.ndarray:
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise GeometryError(f"RGB image must have shape (h, w, 3), got {arr.shape}")
    if arr.dtype != np.uint8:
        if np.any(arr < 0) or np.any(arr > 255):
            raise ParameterError("RGB channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def as_rgba(layer) -> np.ndarray:
    arr = np.asarray(layer)
    if arr.ndim != 3 or arr.shape[2] != 4 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise GeometryError(f"RGBA layer must have shape (h, w, 4), got {arr.shape}")
    if arr.dtype != np.uint8:
        if np.any(arr < 0) or np.any(arr > 255):
            raise ParameterError("RGBA channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def as_mask(mask) -> np.ndarray:
    arr = np.asarray(mask)
    _check_2d(arr, "mask")
    return arr.astype(bool, copy=False)


def as_field(field) -> np.ndarray:
    arr = np.asarray(field, dtype=np.float64)
    _check_2d(arr, "field")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise ParameterError("field values must be finite and in [0, 1]")
    return arr


def as_depth(depth) -> np.ndarray:
    arr = np.asarray(depth, dtype=np.float64)
    _check_2d(arr, "depth map")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise ParameterError("depth values must be finite and in [0, 1]")
    return arr


def round_half_up(values) -> np.ndarray:
    """Round to the nearest integer, halves away from -inf (numpy rounds halves to even)."""
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def _check_kernel(kernel_size: int) -> None:
    if int(kernel_size) != kernel_size or kernel_size < 1 or kernel_size % 2 == 0:
        raise ParameterError(f"kernel size must be a positive odd integer, got {kernel_size!r}")


def gaussian_kernel(kernel_size: int) -> np.ndarray:
    """Normalized 1-D Gaussian weights with sigma derived from the kernel size."""
    _check_kernel(kernel_size)
    if kernel_size == 1:
        return np.ones(1)
    sigma = 0.3 * ((kernel_size - 1) / 2 - 1) + 0.8
    x = np.arange(kernel_size) - (kernel_size - 1) / 2
    w = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return w / w.sum()


def _correlate_rows(arr: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    r = len(weights) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    padded = np.pad(arr, pad, mode="edge")
    out = np.zeros_like(arr)
    n = arr.shape[axis]
    for i, wt in enumerate(weights):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(i, i + n)
        out += wt * padded[tuple(sl)]
    return out


def gaussian_blur(field, kernel_size: int) -> np.ndarray:
    """Separable Gaussian blur with edge replication.

    The result is clipped to the input's value range; the exact convolution
    never leaves it, but summation rounding can overshoot by an ulp.
    """
    _check_kernel(kernel_size)
    f = as_field(field)
    if kernel_size == 1:
        return f.copy()
    w = gaussian_kernel(kernel_size)
    out = _correlate_rows(_correlate_rows(f, w, axis=1), w, axis=0)
    return np.clip(out, f.min(), f.max())


def dilate(mask, kernel_size: int) -> np.ndarray:
    """Binary dilation by a square structuring element, window clipped at the borders."""
    _check_kernel(kernel_size)
    m = as_mask(mask)
    if kernel_size == 1:
        return m.copy()
    # 'nearest' padding only repeats in-bounds pixels, which equals clipping the window
    return ndimage.maximum_filter(m, size=kernel_size, mode="nearest")


def threshold(field, t: float) -> np.ndarray:
    """Inclusive threshold: true where value >= t."""
    return as_field(field) >= t


def center_of_mass(mask) -> tuple[float, float]:
    rows, cols = np.nonzero(as_mask(mask))
    if rows.size == 0:
        raise EmptyMaskError("center of mass of an empty mask")
    return float(rows.mean()), float(cols.mean())


def alpha_composite(background, layer, offset: tuple[int, int] = (0, 0)) -> np.ndarray:
    """Paste ``layer`` over ``background`` with its top-left corner at ``offset = (dx, dy)``.

    Per channel ``(a*fg + (255-a)*bg) / 255`` in integer arithmetic, rounded half up.
    Layer pixels falling outside the background are discarded.
    """
    bg = as_rgb(background)
    fg = as_rgba(layer)
    dx, dy = int(offset[0]), int(offset[1])
    out = bg.copy()
    h, w = bg.shape[:2]
    lh, lw = fg.shape[:2]
    x0, x1 = max(dx, 0), min(dx + lw, w)
    y0, y1 = max(dy, 0), min(dy + lh, h)
    if x0 >= x1 or y0 >= y1:
        return out
    patch = fg[y0 - dy : y1 - dy, x0 - dx : x1 - dx].astype(np.int64)
    under = bg[y0:y1, x0:x1].astype(np.int64)
    a = patch[..., 3:4]
    num = a * patch[..., :3] + (255 - a) * under
    # floor(num / 255 + 1/2) without leaving integers
    out[y0:y1, x0:x1] = ((2 * num + 255) // 510).astype(np.uint8)
    return out


def _bilinear(src: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample ``src`` (h, w, c) on the separable grid ``ys x xs`` with edge replication."""
    h, w = src.shape[:2]
    ys = np.clip(ys, 0.0, h - 1)
    xs = np.clip(xs, 0.0, w - 1)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None, None]
    fx = (xs - x0)[None, :, None]
    s = src.astype(np.float64)
    top = s[y0][:, x0] * (1.0 - fx) + s[y0][:, x1] * fx
    bot = s[y1][:, x0] * (1.0 - fx) + s[y1][:, x1] * fx
    return top * (1.0 - fy) + bot * fy


def _as_raster(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise GeometryError(f"expected an RGB or RGBA raster, got shape {arr.shape}")
    return as_rgb(arr) if arr.shape[2] == 3 else as_rgba(arr)


def resample_bilinear(img, scale: float) -> np.ndarray:
    """Resize an RGB/RGBA raster by ``scale`` using pixel-center aligned bilinear sampling."""
    if not scale > 0 or scale > 8:
        raise ParameterError(f"scale must be in (0, 8], got {scale!r}")
    src = _as_raster(img)
    h, w = src.shape[:2]
    out_h = max(1, math.floor(h * scale + 0.5))
    out_w = max(1, math.floor(w * scale + 0.5))
    ys = (np.arange(out_h) + 0.5) / scale - 0.5
    xs = (np.arange(out_w) + 0.5) / scale - 0.5
    return round_half_up(_bilinear(src, ys, xs)).clip(0, 255).astype(np.uint8)


def scale_about_center(img, factor: float) -> np.ndarray:
    """Zoom an RGB/RGBA raster by ``factor`` about its center, keeping its size."""
    if not factor > 0:
        raise ParameterError(f"zoom factor must be positive, got {factor!r}")
    src = _as_raster(img)
    if factor == 1.0:
        return src.copy()
    h, w = src.shape[:2]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys = cy + (np.arange(h) - cy) / factor
    xs = cx + (np.arange(w) - cx) / factor
    return round_half_up(_bilinear(src, ys, xs)).clip(0, 255).astype(np.uint8)
