"""End-to-end composition: load, layer, refine, inpaint, animate."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import io
from .errors import GeometryError
from .inpaint import inpaint_background
from .layering import InstanceSet, LayerAssignment, PipelineConfig, assign_layers, instances_from_depth
from .motion import FrameSequence, MotionSpec, generate_sequence
from .refine import SceneLayers, split_components


@dataclass
class LayerResult:
    image: np.ndarray = field(repr=False)
    depth: np.ndarray = field(repr=False)
    instances: InstanceSet = field(repr=False)
    fallback_segmenter: bool
    assignment: LayerAssignment
    layers: SceneLayers = field(repr=False)
    inpainted: np.ndarray = field(repr=False)


def build_layers(image, depth, instances=None, config: PipelineConfig | None = None) -> LayerResult:
    """Everything up to the inpainted background; ``instances=None`` engages the fallback segmenter."""
    config = config or PipelineConfig()
    if image.shape[:2] != depth.shape:
        raise GeometryError(f"image {image.shape[:2]} and depth map {depth.shape} differ in size")
    fallback = instances is None
    if fallback:
        instances = instances_from_depth(depth)
    elif instances.shape != depth.shape:
        raise GeometryError(f"masks {instances.shape} and depth map {depth.shape} differ in size")
    assignment = assign_layers(instances, depth, config)
    layers = split_components(image, assignment, config)
    inpainted = inpaint_background(layers, config)
    return LayerResult(image, depth, instances, fallback, assignment, layers, inpainted)


def animate(result: LayerResult, spec: MotionSpec) -> FrameSequence:
    return generate_sequence(result.layers, result.inpainted, spec)


def ranking_rows(assignment: LayerAssignment) -> list[dict]:
    return [
        {"id": ri.id, "area": ri.area, "mean_depth": ri.mean_depth, "layer": assignment.layer_of(ri.id)}
        for ri in assignment.ranking
    ]


def load_inputs(image_path, depth_path, masks_path=None, invert_depth: bool = False):
    image = io.load_rgb(image_path)
    depth = io.load_depth(depth_path, invert=invert_depth)
    instances = io.load_labelmap(masks_path) if masks_path is not None else None
    return image, depth, instances
