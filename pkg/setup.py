"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time); set OSCNORM_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("OSCNORM_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        extensions = cythonize(
            [
                Extension(
                    "oscnorm._kernels",
                    ["src/oscnorm/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=extensions)
