# Builds the optional compiled CSR kernels. The package works without them
# (a numpy fallback is selected at import), so a missing Cython or C compiler
# only costs speed. Set EQUILIBRATE_SKIP_EXT=1 to skip the extension build.
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("EQUILIBRATE_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "equilibrate._kernels._core",
                    ["src/equilibrate/_kernels/_core.pyx"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
