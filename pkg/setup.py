import os

from setuptools import Extension, setup

# The compiled kernels are optional: without Cython (or with
# HHSLAB_NO_EXTENSION=1) the package installs pure-Python only and
# hhslab.kernels falls back to the numpy implementations.
ext_modules = []
if os.environ.get("HHSLAB_NO_EXTENSION") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "hhslab._ckernels",
                    ["src/hhslab/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
