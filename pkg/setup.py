from setuptools import setup, Extension

import numpy

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "rc_etsim._kernels._core",
                ["src/rc_etsim/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    # No Cython: the package runs on the pure-Python kernels.
    ext_modules = []

setup(ext_modules=ext_modules)
