"""Build the optional Cython core.

Set IMAGINARITY_NO_EXT=1 to skip compilation; the package then runs on the
pure-Python backend.
"""
import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("IMAGINARITY_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "imaginarity._core",
        ["src/imaginarity/_core.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extensions())
