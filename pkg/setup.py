import os

import numpy as np
from setuptools import Extension, setup

# TIKREG_NO_EXT=1 installs the pure-Python kernels only.
ext_modules = []
if not os.environ.get("TIKREG_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "tikreg._ckernels",
                ["src/tikreg/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
