import os

from setuptools import Extension, setup

# The compiled BDD kernel is optional: the package falls back to the pure
# Python kernel when the extension is absent.  Set LPADC_NO_EXT=1 to skip
# building it (e.g. on a machine without a C++ toolchain).
ext_modules = []
if os.environ.get("LPADC_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "lpadc._bddcore",
                    ["src/lpadc/_bddcore.pyx"],
                    language="c++",
                    extra_compile_args=["-O2"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
