"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension; `breatherlab._kernels`
falls back to the numpy implementation when the compiled module is missing.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "breatherlab._kernels._speedups",
                ["src/breatherlab/_kernels/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
