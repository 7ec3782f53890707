"""Build script: compiles the optional n-gram statistics extension.

The package works without it (a pure-Python twin is selected at import);
set XLCONSIST_NO_EXT=1 to skip the build explicitly.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("XLCONSIST_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/xlconsist/textmetrics/_ngram_cy.pyx",
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
