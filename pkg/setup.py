"""Builds the optional compiled search kernel.

    pip install -e . --no-build-isolation

If Cython or a C compiler is missing the package still installs and the
pure-Python kernel is used.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("vwsp._csearch", ["src/vwsp/_csearch.pyx"],
                   include_dirs=[np.get_include()],
                   extra_compile_args=["-O3"],
                   optional=True)],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
