"""Builds the optional compiled kernel extension.

The package works without it: hubpathway.diffcore falls back to the numpy
kernel implementations when the extension is missing (see
hubpathway/diffcore/backend.py). Set HUBPATHWAY_SKIP_EXT=1 to skip the
compile step entirely.
"""

import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("HUBPATHWAY_SKIP_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "hubpathway.diffcore._kernels_cy",
        ["src/hubpathway/diffcore/_kernels_cy.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions())
