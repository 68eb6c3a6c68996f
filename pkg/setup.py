#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""The setup script."""

from setuptools import setup, find_packages

with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = ['Click>=8.0', 'nipype>=1.8.6', 'numpy>=1.20', 'scipy>=1.7',
                'jsonschema>=3.2', ]

setup_requirements = ['pytest-runner', ]

test_requirements = ['pytest', ]

setup(
    author="The gyromag developers",
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
    description="Gyroscope-aided magnetometer calibration pipelines based on Nipype.",
    entry_points={
        'console_scripts': [
            'gyromag=gyromag.cli:cli',
            'get_example_data=gyromag.get_example_data:get'
        ],
    },
    install_requires=requirements,
    license="MIT license",
    long_description=readme + '\n\n' + history,
    long_description_content_type='text/x-rst',
    include_package_data=True,
    package_data={'gyromag': ['schemas/*.schema.json']},
    keywords='gyromag',
    name='gyromag',
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.8',
    setup_requires=setup_requirements,
    test_suite='tests',
    tests_require=test_requirements,
    version='0.2.0',
    zip_safe=False,
)
