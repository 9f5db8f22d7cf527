"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python/numpy fallback is
selected at import time), so a failed compile downgrades to a warning
instead of aborting the install.
"""

import sys

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"modeclust: skipping compiled kernels ({exc})", file=sys.stderr)
        return []
    # -ffp-contract=off keeps gcc/clang from fusing a*b+c into fma, which
    # would break bit-parity with the pure-Python backend.
    fp_flags = [] if sys.platform == "win32" else ["-ffp-contract=off"]
    ext = Extension(
        "modeclust._core._kernels",
        ["src/modeclust/_core/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=fp_flags,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


try:
    setup(ext_modules=_extensions())
except SystemExit:
    raise
except Exception as exc:  # compiler missing, broken toolchain, ...
    print(f"modeclust: compiled kernels unavailable ({exc}); "
          "falling back to pure-Python build", file=sys.stderr)
    setup(ext_modules=[])
