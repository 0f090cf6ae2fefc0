"""Build script.

The tree kernels (split search and sample routing) ship as a Cython
extension with a pure-numpy fallback. Set OMX_NO_NATIVE=1 to skip
compiling the extension; the package then runs on the fallback alone.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("OMX_NO_NATIVE"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "omx._kernels._native",
                    sources=["src/omx/_kernels/_native.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
