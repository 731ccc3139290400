"""Deterministic synthetic scene for demos and tests.

A 256x256 striped, lightly noisy background (nearness ramping 0.0 at the top
to 0.3 at the bottom) holding three labeled objects:

* label 1 -- large disk, nearness 0.9
* label 2 -- medium square, nearness 0.6
* label 3 -- tiny dot, nearness 1.0, under 5% of the disk's area
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OutputError
from .io import write_pfm, write_png

SIZE = 256
DISK_CENTER, DISK_RADIUS, DISK_COLOR, DISK_DEPTH = (120, 170), 40, (230, 60, 40), 0.9
SQUARE_ROWS, SQUARE_COLS, SQUARE_COLOR, SQUARE_DEPTH = (150, 200), (20, 70), (60, 120, 220), 0.6
DOT_CENTER, DOT_RADIUS, DOT_COLOR, DOT_DEPTH = (40, 60), 3, (250, 240, 40), 1.0
BACKGROUND_NEAR = 0.3


@dataclass(frozen=True)
class SynthScene:
    image: np.ndarray = field(repr=False)
    depth: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)


def _disk(center, radius):
    yy, xx = np.mgrid[:SIZE, :SIZE]
    return (yy - center[0]) ** 2 + (xx - center[1]) ** 2 <= radius * radius


def make_scene(seed: int = 0) -> SynthScene:
    rng = np.random.default_rng(seed)
    image = np.empty((SIZE, SIZE, 3), dtype=np.uint8)
    col = 0
    while col < SIZE:
        width = int(rng.integers(4, 15))
        image[:, col : col + width] = rng.integers(40, 200, size=3)
        col += width
    noise = rng.integers(-8, 9, size=image.shape)
    image = np.clip(image.astype(np.int64) + noise, 0, 255).astype(np.uint8)

    rows = np.arange(SIZE, dtype=np.float64)[:, None]
    depth = np.repeat(BACKGROUND_NEAR * rows / (SIZE - 1), SIZE, axis=1)
    labels = np.zeros((SIZE, SIZE), dtype=np.uint8)

    square = np.zeros((SIZE, SIZE), dtype=bool)
    square[SQUARE_ROWS[0] : SQUARE_ROWS[1], SQUARE_COLS[0] : SQUARE_COLS[1]] = True
    objects = (
        (1, _disk(DISK_CENTER, DISK_RADIUS), DISK_COLOR, DISK_DEPTH),
        (2, square, SQUARE_COLOR, SQUARE_DEPTH),
        (3, _disk(DOT_CENTER, DOT_RADIUS), DOT_COLOR, DOT_DEPTH),
    )
    for label, mask, color, near in objects:
        image[mask] = color
        depth[mask] = near
        labels[mask] = label
    return SynthScene(image, depth, labels)


def write_scene(scene: SynthScene, directory) -> dict:
    """Write ``image.png``, ``depth.pfm`` and ``labels.png``; returns their paths by role."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"{directory}: {exc}") from None
    paths = {
        "image": write_png(directory / "image.png", scene.image),
        "depth": directory / "depth.pfm",
        "labels": write_png(directory / "labels.png", scene.labels),
    }
    write_pfm(paths["depth"], scene.depth)
    return paths
