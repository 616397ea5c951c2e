from setuptools import setup
from setuptools import find_packages


setup(name='isoland',
      version='0.1.0',
      description='Critical points of random landscapes with isotropic increments',
      license='MIT',
      python_requires='>=3.6',
      install_requires=['numpy>=1.17', 'scipy', 'pyyaml', 'six'],
      extras_require={
          'tests': ['pytest', 'pytest-xdist', 'pytest-cov', 'pytest-pep8', 'hypothesis'],
      },
      entry_points={
          'console_scripts': ['isoland=isoland.cli:main'],
      },
      packages=find_packages(exclude=['tests', 'tests.*']))
