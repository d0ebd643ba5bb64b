"""Build script.

The exact-arithmetic term kernels and the fixed-step integrator loop have a
compiled Cython variant.  The build is optional: when Cython or a C compiler
is unavailable the package installs pure-Python and selects the fallback
kernels at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("frameq._poly_core_cy", ["src/frameq/_poly_core_cy.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
