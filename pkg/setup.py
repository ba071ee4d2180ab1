import os

from setuptools import Extension, setup

try:
    import gmpy2
    from Cython.Build import cythonize
except ImportError:  # build the pure-Python package only
    ext_modules = []
else:
    gdir = os.path.dirname(gmpy2.__file__)
    ext_modules = cythonize(
        [
            Extension(
                "dialg._kernel_c",
                ["src/dialg/_kernel_c.pyx"],
                include_dirs=[gdir],
                libraries=["gmp"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
        include_path=[os.path.dirname(gdir)],
    )

setup(ext_modules=ext_modules)
