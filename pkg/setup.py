#!/usr/bin/env python

"""
Set up for ogus
"""
import codecs
import os.path
from setuptools import setup

VERSION_FILE = os.path.join(os.path.dirname(__file__), 'ogus/VERSION.txt')
with codecs.open(VERSION_FILE, encoding='ascii') as f:
    VERSION = f.read().strip()

COMMANDS = [
    'validate = ogus.commands:ValidateCommand',
    'validate-a = ogus.commands:ValidateACommand',
    'check-admissible = ogus.commands:CheckAdmissibleCommand',
    'polygons = ogus.commands:PolygonsCommand',
    'hom = ogus.commands:HomCommand',
    'hom-a = ogus.commands:HomACommand',
    'hom-motives = ogus.commands:HomMotivesCommand',
    'kernel = ogus.commands:KernelCommand',
    'cokernel = ogus.commands:CokernelCommand',
    'strictness = ogus.commands:StrictnessCommand',
    'ext1 = ogus.commands:Ext1Command',
    'fibre-product = ogus.commands:FibreProductCommand',
    'les-check = ogus.commands:LesCheckCommand',
    'devissage = ogus.commands:DevissageCommand',
    'ta = ogus.commands:TaCommand',
    'embed = ogus.commands:EmbedCommand',
    'sharp = ogus.commands:SharpCommand',
    'kernel-a = ogus.commands:KernelACommand',
    'cokernel-a = ogus.commands:CokernelACommand',
]

setup(
    name='ogus',
    version=VERSION,
    description='Exact linear algebra of filtered phi-modules, Ogus structures and Laumon 1-motives',
    packages=[
        'ogus',
        'ogus.test',
    ],
    include_package_data=True,
    package_data={
        'ogus': ['VERSION.txt'],
        'ogus.test': ['data/*.json'],
    },
    install_requires=[
        'pyyaml',
        'sympy>=1.12',
    ],
    entry_points={
        'console_scripts': ['ogus = ogus.cli:main'],
        'ogus.commands': COMMANDS,
    },
    license='Apache 2.0',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Natural Language :: English',
        'Topic :: Scientific/Engineering :: Mathematics',
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.11",
    ]
)
