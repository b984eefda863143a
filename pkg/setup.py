"""Build the optional compiled tree kernel.

The pure-Python implementation in ``fmcloss.models._tree_py`` is used when
the extension is missing, so a failed compile only costs speed.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("FMCLOSS_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "fmcloss.models._tree_ext",
                    ["src/fmcloss/models/_tree_ext.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
