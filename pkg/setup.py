import sys

from setuptools import Command, setup, find_packages


with open("README.md") as f:
    long_description = f.read()


# Test command for interfacing with py.test
class PyTest(Command):
    description = "Run the test suite with py.test."
    user_options = [('pytest-args=', 'a', "Arguments for py.test")]

    def initialize_options(self):
        self.pytest_args = ""

    def finalize_options(self):
        self.pytest_args = self.pytest_args.split()

    def run(self):
        import pytest
        errno = pytest.main(self.pytest_args + ["pyTabDev/tests"])
        sys.exit(errno)


setup(
    name='pyTabDev',
    version='0.1.0',
    packages=find_packages(exclude=["*test*"]),
    cmdclass={'test': PyTest},
    description='pyTabDev provides high-dimensional deviation tests of mean '
                'vectors built on the two-armed bandit statistic, together '
                'with its limiting distribution and a Monte Carlo harness.',
    long_description=long_description,
    long_description_content_type='text/markdown',
    python_requires='>=3.8',
    install_requires=['numpy>=1.20', 'scipy>=1.7', 'Jinja2>=2.11',
                      'tomli>=1.1; python_version < "3.11"'],
    tests_require=['pytest', 'mpmath'],
    package_dir={'': '.'},
    package_data={'pyTabDev': ["templates/report/*"]},
    entry_points={'console_scripts': ['tabdev = pyTabDev.cli:main']},
    classifiers = [
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Development Status :: 3 - Alpha',
        'Natural Language :: English',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Mathematics',
        ],
)
