"""Parallax-motion frame sequences from a single image.

Instance masks and a depth map split the scene into a foreground cutout and an
inpainted background, which are then moved at different speeds and
recomposited frame by frame.
"""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (
    ContractError,
    EmptyInputError,
    EmptyMaskError,
    FormatError,
    GeometryError,
    InputError,
    NoBoundaryError,
    OutputError,
    ParallaxError,
    ParameterError,
    PipelineError,
)
from .inpaint import DistanceField, fmm_distance, inpaint_background, telea_inpaint
from .layering import (
    Instance,
    InstanceSet,
    LayerAssignment,
    PipelineConfig,
    RankedInstance,
    assign_layers,
    filter_small,
    instances_from_depth,
    join_near,
    make_instance,
    mean_depth_at,
    rank_instances,
    two_layer_split,
)
from .motion import FrameSequence, MotionSpec, Movement, generate_sequence, offset_sequence, render_frame
from .refine import SceneLayers, expand_background_hole, refine_foreground_mask, split_components
