"""Pick the compiled kernels when available, else the pure-Python twins."""
try:
    from ._fastmarch import fmm_march, telea_fill

    BACKEND = "cython"
except ImportError:  # extension not built
    from ._fastmarch_py import fmm_march, telea_fill

    BACKEND = "python"

__all__ = ["fmm_march", "telea_fill", "BACKEND"]
