from codecs import open
import re
try:
    from setuptools import setup
except ImportError:  # noqa
    from distutils.core import setup
import sys

if 'sdist' in sys.argv or 'bdist_wheel' in sys.argv:
    long_description = open('README.md', 'r', 'utf-8').read()
else:
    long_description = ''

with open('lgmech/version.py', 'r', 'utf-8') as fd:
    version = re.search(
        r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]',
        fd.read(), re.MULTILINE).group(1)

if not version or len(version) == 0:
    raise RuntimeError('Cannot find version')

packages = [
    'lgmech',
    'lgmech.models',
    'lgmech.operations',
    'lgmech_cli',
]

install_requires = [
    'click>=7.0,<9',
    'networkx>=2.5',
    'numpy>=1.19',
    'python-dateutil>=2.8.1,<3',
    'ruamel.yaml>=0.17',
]

setup(
    name='lgmech',
    version=version,
    author='The lgmech Authors',
    author_email='',
    description='Decentralized Nash implementation of local public goods '
    'on directed networks',
    platforms='any',
    license='MIT',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=packages,
    package_dir={'lgmech': 'lgmech', 'lgmech_cli': 'cli'},
    entry_points={
        'console_scripts': 'lgmech=lgmech_cli.cli:cli',
    },
    zip_safe=False,
    python_requires='>=3.7',
    install_requires=install_requires,
    tests_require=['pytest', 'jsonschema'],
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    keywords=[
        'mechanism design', 'nash equilibrium', 'public goods', 'network',
        'lindahl', 'budget balance',
    ],
)
