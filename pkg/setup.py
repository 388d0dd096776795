"""Builds the compiled message-passing kernels. If the extension cannot be
built, the package still works through the numpy fallback (insbank.backend
selects at import)."""
import os
import sys

from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("INSBANK_SKIP_EXT") != "1":
    from setuptools import Extension

    openmp_flags = ["-fopenmp"] if sys.platform != "darwin" else []
    ext_modules = cythonize(
        [
            Extension(
                "insbank._kernels",
                sources=["src/insbank/_kernels.pyx"],
                extra_compile_args=["-O3", "-march=native", "-funroll-loops"] + openmp_flags,
                extra_link_args=openmp_flags,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
