"""Build hook for the optional compiled solver core.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so a missing Cython or C compiler must not break
installation.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "qubofs._kernels._core",
                ["src/qubofs/_kernels/_core.pyx"],
                # -ffp-contract=off keeps the compiled arithmetic free of
                # fused multiply-adds so it matches the NumPy fallback
                # bit for bit on every platform.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
