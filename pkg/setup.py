import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("MDRF_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        # pure-Python install; mdrf.kernels falls back to numpy
        return []
    ext = Extension(
        "mdrf._ckernels",
        ["src/mdrf/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions())
