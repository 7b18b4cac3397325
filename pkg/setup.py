"""Build script for the optional Cython kernels.

The package works without them: ``relzk.kernels`` falls back to the
pure-Python/numpy implementation when the extension is missing.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RELZK_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "relzk.kernels._ckernels",
                    ["src/relzk/kernels/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
