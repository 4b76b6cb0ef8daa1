"""Build script for the optional compiled reduction kernels.

The package is fully functional without the extension: every kernel has a
numpy implementation in ``blocknorm.kernels.reference`` that is selected at
import time when ``blocknorm.kernels._fastkern`` is missing.  Set
``BLOCKNORM_NO_EXT=1`` to skip compilation entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Compile if possible; fall back to a pure-python install otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            print(f"warning: skipping compiled kernels ({exc}); "
                  "falling back to the numpy implementation")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "falling back to the numpy implementation")


def extensions():
    if os.environ.get("BLOCKNORM_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "blocknorm.kernels._fastkern",
        ["src/blocknorm/kernels/_fastkern.pyx"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
