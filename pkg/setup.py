from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; the kernels fall back at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("bvinf._ckernels", ["src/bvinf/_ckernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
