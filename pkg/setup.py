import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension("bialg._ckernels", ["src/bialg/_ckernels.pyx"], include_dirs=[np.get_include()]),
]

setup(ext_modules=cythonize(extensions, language_level=3), package_data={"bialg": ["*.pyx", "*.json"]})
