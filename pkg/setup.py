#!/usr/bin/env python

"""
doob-fiducial
-------------

Monte Carlo sampler for Doob fiducial distributions: statistic chains
T_{m+1} = H_m(T_m, Z_m) are started at the observed statistic and run to
their almost sure limits. Includes closed-form Fisher fiducial oracles,
convergence diagnostics and a regression sampler driven by a Bayesian
bootstrap of the covariates.
"""

from setuptools import setup, find_packages
import ast
import re


# Thanks flask: https://github.com/mitsuhiko/flask/blob/master/setup.py
_version_re = re.compile(r'__version__\s+=\s+(.*)')

with open('fiducial/__init__.py', 'rb') as f:
    version = str(ast.literal_eval(_version_re.search(
        f.read().decode('utf-8')).group(1)))


if __name__ == '__main__':
    setup(
        name='doob-fiducial',
        version=version,
        description='Doob fiducial sampler with Fisher fiducial oracles and convergence diagnostics.',
        long_description=__doc__,
        packages=find_packages(exclude=['test', 'test.*']),
        package_data={
            'fiducial.report': ['templates/*.txt']
        },
        include_package_data=True,
        python_requires='>=3.8',
        install_requires=['jinja2', 'numpy>=1.22', 'scipy>=1.7'],
        extras_require={
            'test': ['pytest']
        },
        entry_points={
            'console_scripts': [
                'fiducial = fiducial.__main__:main'
            ],
            'fiducial.model': [
                'copula = fiducial.models:Copula',
                'exponential = fiducial.models:Exponential',
                'gamma = fiducial.models:Gamma',
                'normal = fiducial.models:Normal',
                'normalmv = fiducial.models:NormalMeanVariance',
                'uniform = fiducial.models:Uniform',
                'uniform2 = fiducial.models:UniformPair',
                'weibull = fiducial.models:Weibull'
            ]
        },
        classifiers=[
            'Development Status :: 4 - Beta',
            'Environment :: Console',
            'Intended Audience :: Education',
            'Intended Audience :: Science/Research',
            'License :: OSI Approved :: MIT License',
            'Natural Language :: English',
            'Operating System :: OS Independent',
            'Programming Language :: Python :: 3',
            'Programming Language :: Python :: 3.8',
            'Programming Language :: Python :: 3.9',
            'Programming Language :: Python :: 3.10',
            'Programming Language :: Python :: 3.11',
            'Topic :: Scientific/Engineering :: Mathematics',
            'Topic :: Utilities'
        ],
        keywords='fiducial inference martingale posterior monte carlo bootstrap',
        license='MIT',
        platforms='any'
    )
