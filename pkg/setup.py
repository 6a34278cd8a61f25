"""Builds the optional compiled profile-closure kernel.

The package works without it: awarecheck.kernel falls back to the pure-Python
implementation when the extension is missing (e.g. no C compiler or Cython).
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "awarecheck._kernel_c",
                ["src/awarecheck/_kernel_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
