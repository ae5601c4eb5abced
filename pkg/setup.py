"""Build script for the optional compiled fast path.

The package is fully functional without the extension; abkit.backend falls
back to the pure-NumPy kernels if _fast is absent or fails to build.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "abkit._fast",
                ["src/abkit/_fast.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - degraded build still usable
    import sys

    print(f"abkit: compiled fast path disabled ({exc})", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
