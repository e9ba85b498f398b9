"""Build script for the optional compiled kernels.

The package works without the extensions (a numpy fallback is selected at
import time), so compilation failures downgrade to a pure-python install
instead of aborting.
"""

import numpy as np
from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


class OptionalBuildExt(build_ext):
    """Build extensions if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except (CCompilerError, ExecError, PlatformError) as exc:
            print(f"WARNING: compiled kernels skipped ({exc}); "
                  "falling back to pure-python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, PlatformError, ValueError) as exc:
            print(f"WARNING: could not build {ext.name} ({exc}); "
                  "falling back to pure-python kernels")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    exts = [
        Extension(
            "covertqnet.kernels._quadcore",
            ["src/covertqnet/kernels/_quadcore.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
        ),
        Extension(
            "covertqnet.kernels._densecore",
            ["src/covertqnet/kernels/_densecore.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
        ),
    ]
    return cythonize(exts, language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
