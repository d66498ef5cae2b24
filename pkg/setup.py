"""Build script: compiles the optional Cython kernel.

The package works without it; ``fdivmetric._kernels`` falls back to the
numpy implementation when the extension is missing.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("FDIVMETRIC_NO_EXT", "") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "fdivmetric._tmap",
                    ["src/fdivmetric/_tmap.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
