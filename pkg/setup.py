"""Build script for the compiled kernel extension.

The package works without the extension (a pure numpy fallback is selected at
import time), but the compiled core is required to hit the planner's intended
throughput on full-size problems.
"""

import os

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

PYX = "src/quadplan/_kernels/_native.pyx"

extensions = []
if os.path.exists(PYX):
    extensions.append(
        Extension(
            "quadplan._kernels._native",
            [PYX],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
    )

setup(ext_modules=cythonize(extensions, language_level=3))
