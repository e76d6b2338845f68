"""Build script: compiles the fused evaluation kernels when a toolchain is
available and falls back to the pure numpy backend otherwise."""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Treat extension build failures as a warning, not an error.

    The package is fully functional without the extension; kernels.py picks
    the numpy backend at import time when beamswarm._core is missing.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing entirely
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        warnings.warn(
            "compiled kernels were not built (%s); beamswarm will use the "
            "numpy backend" % (exc,)
        )


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "beamswarm._core",
                ["src/beamswarm/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
