from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension("magnuslab._speedups", ["src/magnuslab/_speedups.pyx"]),
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
