import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: install the pure-Python package only
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "dirichlet_lab._kernels",
                ["src/dirichlet_lab/_kernels.pyx"],
                include_dirs=[np.get_include()],
                # separate libm cos/sin calls (no sincos fusion, no FMA) keep
                # random walks bit-identical to the pure-Python fallback
                extra_compile_args=["-O3", "-fno-builtin-sin", "-fno-builtin-cos", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
