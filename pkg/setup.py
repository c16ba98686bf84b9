"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a NumPy/pure-Python
backend is selected at import time), so any build failure here downgrades
to a pure-Python install instead of aborting.

Set CACHEWAVE_PURE=1 to skip the extension on purpose.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CACHEWAVE_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "cachewave._backend._cykernels",
                    ["src/cachewave/_backend/_cykernels.pyx"],
                    # -ffp-contract=off: forbid FMA contraction so the C loops
                    # round exactly like the NumPy backend (the test suite
                    # asserts bitwise-equal Monte Carlo counts across backends).
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
