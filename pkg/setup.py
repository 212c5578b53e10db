from setuptools import setup, Extension
from Cython.Build import cythonize

mc_core = Extension(
    "refl6v._mc_core",
    ["src/refl6v/_mc_core.pyx"],
    extra_compile_args=["-O3"],
)

setup(
    ext_modules=cythonize(
        [mc_core],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
)
