#!/usr/bin/env python

from setuptools import setup

setup(name='agesampler',
      version='0.1.0',
      description='Online threshold learning for age-of-information '
                  'sampling over unreliable channels',
      packages=['agetools', 'agetools.rng', 'agesampler'],
      install_requires=['numpy', 'scipy', 'matplotlib', 'jsonschema'],
      entry_points={'console_scripts': [
          'agesampler = agesampler.sampler_cli:main']},
      )
