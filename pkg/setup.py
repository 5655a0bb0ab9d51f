"""Build the optional compiled tailbone kernel.

The package works without it: ``frechet_skew.kernels`` falls back to the
numpy implementation when ``_kernels`` cannot be imported.  Set
``FRECHET_SKEW_NO_EXT=1`` to skip compilation.
"""

import os

from setuptools import setup


def extensions():
    if os.environ.get("FRECHET_SKEW_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "frechet_skew._kernels",
        ["src/frechet_skew/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
