"""Builds the optional compiled Howell kernel; the package works without it."""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("twistlab._howell", ["src/twistlab/_howell.pyx"], include_dirs=[numpy.get_include()])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
