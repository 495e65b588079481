# !usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under a 3-clause BSD license.

import os
import glob

from setuptools import setup, find_packages

NAME = 'rcafmas'
# Use x.x.xdev, not x.x.x-dev
VERSION = '0.1.0dev'


def package_files(root):
    """
    Return all files under a package subdirectory, relative to the package.
    """
    files = []
    for path, _, fnames in os.walk(root):
        rel = os.path.relpath(path, NAME)
        files += [os.path.join(rel, f) for f in fnames if not f.endswith('.pyc')]
    return files


def scripts():
    """Executables in ``bin/``."""
    return sorted(glob.glob(os.path.join('bin', '*'))) if os.path.isdir('bin') else []


def requirements(fname='requirements.txt'):
    """
    Read the dependencies from a pip requirements file, skipping comments
    and nested ``-r`` includes.
    """
    with open(os.path.join(os.path.dirname(os.path.abspath(__file__)), fname)) as f:
        lines = [l.strip() for l in f]
    return [l for l in lines if len(l) > 0 and not l.startswith(('#', '-r'))]


if __name__ == '__main__':

    with open('README.md') as f:
        long_description = f.read()

    setup(name=NAME,
          version=VERSION,
          license='BSD3',
          description='Row-column array plane-wave ultrasound simulation, beamforming, and '
                      'multiply-and-sum compounding',
          long_description=long_description,
          long_description_content_type='text/markdown',
          author='rcafmas developers',
          keywords='ultrasound, row-column arrays, plane waves, beamforming, imaging',
          packages=find_packages(),
          package_data={NAME: package_files(os.path.join(NAME, 'data', 'config'))},
          python_requires='>=3.7',
          include_package_data=True,
          scripts=scripts(),
          install_requires=requirements(),
          setup_requires=['pytest-runner'],
          tests_require=['pytest'],
          extras_require={'dev': requirements('requirements_dev.txt'),
                          'docs': requirements('requirements_doc.txt')},
          classifiers=[
              'Development Status :: 3 - Alpha',
              'Intended Audience :: Science/Research',
              'License :: OSI Approved :: BSD License',
              'Natural Language :: English',
              'Operating System :: OS Independent',
              'Programming Language :: Python :: 3',
              'Topic :: Scientific/Engineering :: Medical Science Apps.',
              'Topic :: Scientific/Engineering :: Physics',
          ])

