import os

from setuptools import Extension, setup

# The compiled core is optional: without Cython or a compiler the package
# falls back to the numpy kernels in holobias._kernels_py.
ext_modules = []
if os.environ.get("HOLOBIAS_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "holobias._kernels",
                    ["src/holobias/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    # No fast-math and no FMA contraction: the support-bound
                    # check relies on plain IEEE rounding of each term.
                    extra_compile_args=["-O3", "-fopenmp", "-ffp-contract=off"],
                    extra_link_args=["-fopenmp"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
