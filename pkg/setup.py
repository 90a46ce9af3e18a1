"""Build the optional compiled kernel extension.

The package works without it (a numpy/pure-Python fallback is selected at
import time), so a failed compile only costs speed.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        "src/blast/_kernels/_ck.pyx",
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
    for ext in ext_modules:
        ext.include_dirs.append(np.get_include())
except Exception as exc:  # pragma: no cover
    sys.stderr.write(f"warning: compiled kernels disabled ({exc}); using pure-Python fallback\n")

setup(ext_modules=ext_modules)
