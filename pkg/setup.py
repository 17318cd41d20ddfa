"""Builds the optional compiled scan kernel.

Set ASKSCI_NO_EXT=1 to skip compilation; the package then runs on the
numpy fallback selected at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ASKSCI_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "asksci._scan._scan_cy",
                    sources=["src/asksci/_scan/_scan_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
