import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None and os.path.exists("src/apollonia/_bfs_cy.pyx"):
    extensions = cythonize(
        [
            Extension(
                "apollonia._bfs_cy",
                ["src/apollonia/_bfs_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                language="c++",
            )
        ],
        compiler_directives={"language_level": "3"},
    )

# The compiled kernels are an optimization; apollonia.kernels falls back to
# the pure-Python implementation when the extension is absent.
setup(ext_modules=extensions)
