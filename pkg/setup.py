import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# The compiled core is optional at runtime (hslg._kernels falls back to the
# pure-Python implementation) but is built by default here.
extensions = [
    Extension(
        "hslg._kernels._core",
        sources=["src/hslg/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
