import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "lmkit.kernels._ckernels",
                ["src/lmkit/kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3, "embedsignature": True},
    )
except ImportError:
    # Without Cython the package still installs; lmkit.kernels falls back
    # to the NumPy implementation at import time.
    extensions = []

setup(ext_modules=extensions)
