"""Build the optional Cython kernels.

A failed compile is not fatal: the package then runs on the numpy fallback
in ``biphoton_waveform._kernels_py``.
"""
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover
            print(f"warning: Cython kernels not built ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"warning: could not build {ext.name} ({exc}); using numpy fallback")


ext_modules = []
if cythonize is not None:
    extensions = [
        Extension(
            "biphoton_waveform._kernels",
            ["src/biphoton_waveform/_kernels.pyx"],
            include_dirs=[numpy.get_include()],
            extra_compile_args=["-O3"] if sys.platform != "win32" else ["/O2"],
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
