import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; genset.kernels falls back
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("GENSET_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "genset._ckernels",
                ["src/genset/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
