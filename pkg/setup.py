"""Build script: compiles the optional extension module.

The package works without the extension (a numpy fallback is selected at
import time), so any failure to cythonize or compile downgrades to a
pure-Python install instead of aborting.
"""

import os

from setuptools import setup


def _extensions():
    if os.environ.get("PITSPEC_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        ["src/pitspec/_ext.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
        include_path=[numpy.get_include()],
    )


def _include_dirs():
    try:
        import numpy

        return [numpy.get_include()]
    except ImportError:
        return []


setup(ext_modules=_extensions(), include_dirs=_include_dirs())
