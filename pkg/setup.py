# -*- coding: utf-8 -*-
from setuptools import setup

packages = \
['schottky_spectral']

package_data = \
{'': ['*'], 'schottky_spectral': ['data/*']}

install_requires = \
['cached-property>=1.5',
 'more-itertools>=8.0',
 'mpmath>=1.2',
 'numpy>=1.22',
 'ordered-set>=3.0',
 'pydantic>=1.10,<2.0',
 'ruamel.yaml>=0.17',
 'scipy>=1.8']

entry_points = \
{'console_scripts': ['schottky-spectral = schottky_spectral.cli:main']}


setup_kwargs = {
    'name': 'schottky-spectral',
    'version': '1.0.0',
    'description': 'Spectral triples, Patterson-Sullivan measures and zeta functions of Schottky groups',
    'long_description': open('README.md').read(),
    'long_description_content_type': 'text/markdown',
    'author': 'Schottky Spectral Developers',
    'packages': packages,
    'package_data': package_data,
    'install_requires': install_requires,
    'entry_points': entry_points,
    'python_requires': '>=3.8,<4.0',
}


setup(**setup_kwargs)
