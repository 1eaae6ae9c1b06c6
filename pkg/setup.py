"""Build hook for the optional compiled alignment kernel.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); the kernel only accelerates the
token-subsequence search that dominates decoding large corpora.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("anlforge._alignment_cy", ["src/anlforge/_alignment_cy.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
