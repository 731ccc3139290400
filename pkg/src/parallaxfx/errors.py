"""Exception hierarchy.

Every failure raised by the library derives from :class:`ParallaxError`. The
CLI maps the three top-level families onto exit codes: input problems (1),
pipeline problems (2) and output problems (3).
"""


class ParallaxError(Exception):
    """Base class for all library errors."""


class InputError(ParallaxError):
    """An input file is missing, unreadable or cannot be decoded."""


class FormatError(InputError):
    """An input file decodes but violates the expected layout."""


class OutputError(ParallaxError):
    """An output path cannot be written."""


class PipelineError(ParallaxError):
    """A processing stage rejected its inputs."""


class ParameterError(PipelineError, ValueError):
    pass


class GeometryError(PipelineError):
    """Shapes, coordinates or viewports are inconsistent."""


class EmptyInputError(PipelineError):
    """No instances to work with."""


class EmptyMaskError(PipelineError):
    pass


class NoBoundaryError(PipelineError):
    """The hole covers the whole image, so there is nothing to march from."""


class ContractError(PipelineError):
    """A caller broke an ordering or structural precondition."""
