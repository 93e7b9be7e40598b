import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SALSS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install; salss.backend falls back
        pass
    else:
        ext_modules = cythonize(
            [Extension("salss._kernel", ["src/salss/_kernel.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
