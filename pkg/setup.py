"""Build script for the optional compiled kernels.

The package is fully functional without the extension: mfswipt._kernels
falls back to its numpy reference implementation when the compiled module
is absent, so any build failure here is deliberately non-fatal.
"""

import sys

from setuptools import setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"mfswipt: compiled kernels skipped ({exc})", file=sys.stderr)
        return []
    from setuptools import Extension

    ext = Extension(
        "mfswipt._kernels._fast",
        sources=["src/mfswipt/_kernels/_fast.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    try:
        return cythonize(
            [ext],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ValueError as exc:  # e.g. the .pyx missing from a stripped tree
        print(f"mfswipt: compiled kernels skipped ({exc})", file=sys.stderr)
        return []


setup(ext_modules=_extensions())
