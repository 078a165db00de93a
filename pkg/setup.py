"""Build hooks for the optional compiled kernel extension.

The package works without the extension (a NumPy implementation of the
same kernels is selected at import time), so a failed Cython build must
never break installation.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fdem1d._core._kernels",
                ["src/fdem1d/_core/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"fdem1d: skipping compiled kernels ({exc}); pure-NumPy path only")

setup(ext_modules=ext_modules)
