"""Build the optional GMP kernel extension.

If Cython or the GMP headers are unavailable the package installs without
it and falls back to the pure-Python kernels at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "qzeta._ckernels",
                ["src/qzeta/_ckernels.pyx"],
                libraries=["gmp"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"qzeta: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
