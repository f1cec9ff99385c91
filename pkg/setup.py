"""Build script. The compiled kernel extension is optional: when Cython or a C
compiler is unavailable the install proceeds and the package falls back to the
pure NumPy kernels at import time."""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            print(f"warning: skipping native kernels ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); using pure-Python fallback")


ext_modules = []
cmdclass = {}
if not os.environ.get("STANCENET_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize

        ext = Extension(
            "stancenet.kernels._native",
            ["src/stancenet/kernels/_native.pyx"],
            extra_compile_args=["-O3", "-fopenmp"],
            extra_link_args=["-fopenmp"],
        )
        ext_modules = cythonize(
            [ext],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError:
        print("warning: Cython not available; installing with pure-Python kernels only")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
