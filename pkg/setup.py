import os

import numpy as np
from setuptools import Extension, setup

# Set PARALLAXFX_NO_EXT=1 to install the pure-Python fallback only.
ext_modules = []
if not os.environ.get("PARALLAXFX_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "parallaxfx._fastmarch",
                ["src/parallaxfx/_fastmarch.pyx"],
                include_dirs=[np.get_include()],
                # no fp contraction: the fallback must reproduce results bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
