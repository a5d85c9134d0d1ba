"""Build script for the optional compiled bit-packing kernels.

The package is pure Python by default; if Cython and a C compiler are
available the `pbbc.kernels._bitpack` extension is built and picked up at
import time. A failed extension build degrades to the numpy fallback
rather than failing the install.
"""

import os

from setuptools import setup

ext_modules = []
cmdclass = {}

if os.environ.get("PBBC_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/pbbc/kernels/_bitpack.pyx"],
            compiler_directives={"language_level": "3"},
        )
        for ext in ext_modules:
            ext.extra_compile_args = ["-O3"]
            ext.optional = True
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass=cmdclass)
