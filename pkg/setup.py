from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension("rpslab._kernel", ["src/rpslab/_kernel.pyx"]),
]

setup(
    ext_modules=cythonize(extensions, language_level=3),
)
