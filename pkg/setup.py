"""Build hooks: compile the optional geometry kernel extension.

The package works without the extension (pure-Python kernels are selected
at import time), so any failure here downgrades to a plain install instead
of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "vinesim.kernels._fastgeom",
                ["src/vinesim/kernels/_fastgeom.pyx"],
                # -ffp-contract=off: the compiled kernels must be bit-identical
                # to the pure-Python reference (no FMA contraction).
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"vinesim: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
