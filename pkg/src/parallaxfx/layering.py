"""Fuse instance masks with the depth map and decide what moves as foreground.

Objects are ranked by the mean nearness in a small window around their center
of mass. Three heuristics then shape the foreground: tiny objects are pushed
to the background, consecutive objects of similar nearness are joined, and an
optional two-layer mode splits everything at the depth-map median.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ContractError, EmptyInputError, GeometryError, ParameterError
from .imagecore import as_depth, as_mask, center_of_mass

__all__ = [
    "Instance",
    "InstanceSet",
    "RankedInstance",
    "LayerAssignment",
    "PipelineConfig",
    "make_instance",
    "mean_depth_at",
    "rank_instances",
    "filter_small",
    "join_near",
    "two_layer_split",
    "assign_layers",
    "instances_from_depth",
    "MIN_COMPONENT_AREA",
]

# smallest component kept by the depth-threshold fallback segmenter
MIN_COMPONENT_AREA = 64


@dataclass(frozen=True)
class Instance:
    id: int
    mask: np.ndarray = field(repr=False, compare=False)
    area: int

    def __post_init__(self):
        if self.id < 0:
            raise ParameterError(f"instance id must be non-negative, got {self.id}")
        count = int(np.count_nonzero(self.mask))
        if count == 0:
            raise EmptyInputError(f"instance {self.id} has an empty mask")
        if count != self.area:
            raise ParameterError(f"instance {self.id}: area {self.area} != mask pixel count {count}")


def make_instance(id: int, mask) -> Instance:
    m = as_mask(mask)
    return Instance(int(id), m, int(np.count_nonzero(m)))


class InstanceSet(tuple):
    """Ordered, id-unique collection of instances."""

    def __new__(cls, instances=()):
        items = tuple(instances)
        ids = [inst.id for inst in items]
        if len(set(ids)) != len(ids):
            raise ParameterError(f"duplicate instance ids in {ids}")
        return super().__new__(cls, items)

    @property
    def shape(self) -> tuple[int, int] | None:
        return self[0].mask.shape if self else None

    def by_id(self, id: int) -> Instance:
        for inst in self:
            if inst.id == id:
                return inst
        raise KeyError(id)


@dataclass(frozen=True)
class RankedInstance:
    instance: Instance
    center: tuple[float, float]
    mean_depth: float

    @property
    def id(self) -> int:
        return self.instance.id

    @property
    def area(self) -> int:
        return self.instance.area


@dataclass(frozen=True)
class LayerAssignment:
    foreground_ids: frozenset
    background_ids: frozenset
    foreground_mask: np.ndarray = field(repr=False, compare=False)
    # every instance (kept and demoted), nearest first
    ranking: tuple = ()

    def layer_of(self, id: int) -> str:
        return "foreground" if id in self.foreground_ids else "background"


@dataclass(frozen=True)
class PipelineConfig:
    depth_kernel: int = 5
    blur_kernel: int = 7
    dilate_kernel: int = 11
    min_relative_area: float = 0.05
    join_tolerance: float = 0.20
    binarize_threshold: float = 0.5
    inpaint_radius: float = 5.0
    two_layer_mode: bool = False
    feather: bool = False

    def __post_init__(self):
        for name in ("depth_kernel", "blur_kernel", "dilate_kernel"):
            k = getattr(self, name)
            if int(k) != k or k < 1 or k % 2 == 0:
                raise ParameterError(f"{name} must be a positive odd integer, got {k!r}")
        for name in ("min_relative_area", "join_tolerance", "binarize_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {v!r}")
        if not self.inpaint_radius >= 1.0:
            raise ParameterError(f"inpaint_radius must be >= 1, got {self.inpaint_radius!r}")


def mean_depth_at(depth, center: tuple[float, float], kernel: int) -> float:
    """Mean depth in a ``kernel x kernel`` window at the rounded center, clipped to the map."""
    d = as_depth(depth)
    if int(kernel) != kernel or kernel < 1 or kernel % 2 == 0:
        raise ParameterError(f"kernel must be a positive odd integer, got {kernel!r}")
    r = math.floor(center[0] + 0.5)
    c = math.floor(center[1] + 0.5)
    h, w = d.shape
    if not (0 <= r < h and 0 <= c < w):
        raise GeometryError(f"center {center} rounds to ({r}, {c}), outside a {h}x{w} map")
    half = kernel // 2
    window = d[max(r - half, 0) : r + half + 1, max(c - half, 0) : c + half + 1]
    return float(window.mean())


def _rank_key(ri: RankedInstance):
    return (-ri.mean_depth, -ri.area, ri.id)


def rank_instances(instances, depth, config: PipelineConfig | None = None) -> list[RankedInstance]:
    """Nearest first; ties go to the larger object, then to the smaller id."""
    config = config or PipelineConfig()
    d = as_depth(depth)
    ranked = []
    for inst in instances:
        if inst.mask.shape != d.shape:
            raise GeometryError(
                f"instance {inst.id} mask {inst.mask.shape} does not match depth map {d.shape}"
            )
        center = center_of_mass(inst.mask)
        ranked.append(RankedInstance(inst, center, mean_depth_at(d, center, config.depth_kernel)))
    ranked.sort(key=_rank_key)
    return ranked


def filter_small(instances, config: PipelineConfig | None = None) -> tuple[InstanceSet, InstanceSet]:
    """Split into (kept, demoted); demoted objects cover less than ``min_relative_area`` of the largest."""
    config = config or PipelineConfig()
    if len(instances) == 0:
        raise EmptyInputError("no instances to filter")
    largest = max(inst.area for inst in instances)
    kept, demoted = [], []
    for inst in instances:
        (demoted if inst.area / largest < config.min_relative_area else kept).append(inst)
    return InstanceSet(kept), InstanceSet(demoted)


def _joined(near: float, far: float, tolerance: float) -> bool:
    if near == 0.0:
        return far == 0.0
    return (near - far) / near <= tolerance


def join_near(ranked, config: PipelineConfig | None = None) -> list[list[RankedInstance]]:
    """Chain consecutive neighbours of the nearest-first order whose relative gap is within tolerance."""
    config = config or PipelineConfig()
    ranked = list(ranked)
    for a, b in zip(ranked, ranked[1:]):
        if a.mean_depth < b.mean_depth:
            raise ContractError("join_near expects instances sorted nearest first")
    groups: list[list[RankedInstance]] = []
    for i, ri in enumerate(ranked):
        if i and _joined(ranked[i - 1].mean_depth, ri.mean_depth, config.join_tolerance):
            groups[-1].append(ri)
        else:
            groups.append([ri])
    return groups


def _union(instances, shape) -> np.ndarray:
    out = np.zeros(shape, dtype=bool)
    for inst in instances:
        out |= inst.mask
    return out


def two_layer_split(instances, ranked, depth) -> LayerAssignment:
    """Objects whose mean nearness falls below the map median go to the background."""
    d = as_depth(depth)
    for inst in instances:
        if inst.mask.shape != d.shape:
            raise GeometryError(f"instance {inst.id} mask {inst.mask.shape} does not match depth map {d.shape}")
    median = float(np.median(d))
    fg = {ri.id for ri in ranked if not ri.mean_depth < median}
    if not fg and ranked:
        fg = {ranked[0].id}
    all_ids = {inst.id for inst in instances}
    missing = all_ids - {ri.id for ri in ranked}
    if missing:
        raise ContractError(f"instances {sorted(missing)} are missing from the ranking")
    fg_insts = [inst for inst in instances if inst.id in fg]
    return LayerAssignment(
        frozenset(fg), frozenset(all_ids - fg), _union(fg_insts, d.shape), tuple(ranked)
    )


def assign_layers(instances, depth, config: PipelineConfig | None = None) -> LayerAssignment:
    config = config or PipelineConfig()
    if len(instances) == 0:
        raise EmptyInputError("no instances to assign")
    d = as_depth(depth)
    kept, demoted = filter_small(instances, config)
    ranked = rank_instances(kept, d, config)
    if config.two_layer_mode:
        fg = set(two_layer_split(kept, ranked, d).foreground_ids)
    else:
        fg = {ri.id for ri in join_near(ranked, config)[0]}
    all_ids = {inst.id for inst in instances}
    ranking = sorted(ranked + rank_instances(demoted, d, config), key=_rank_key)
    fg_insts = [inst for inst in instances if inst.id in fg]
    return LayerAssignment(
        frozenset(fg), frozenset(all_ids - fg), _union(fg_insts, d.shape), tuple(ranking)
    )


def instances_from_depth(depth) -> InstanceSet:
    """Fallback segmenter: 4-connected regions strictly nearer than the median.

    Not part of the layering method proper; it only lets the pipeline run when
    no instance masks are supplied.
    """
    d = as_depth(depth)
    above = d > np.median(d)
    labels, count = ndimage.label(above)  # default structure is 4-connected
    insts = []
    if count:
        areas = np.bincount(labels.ravel(), minlength=count + 1)
        for lab in range(1, count + 1):
            if areas[lab] >= MIN_COMPONENT_AREA:
                insts.append(Instance(lab, labels == lab, int(areas[lab])))
    if not insts:
        raise EmptyInputError(
            f"fallback segmenter found no region of at least {MIN_COMPONENT_AREA} px above the depth median"
        )
    return InstanceSet(insts)
