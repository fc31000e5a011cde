# -*- coding: utf-8 -*-
#
# ogus documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import codecs
import datetime
import os
import sys

VERSION_FILE = os.path.join(os.path.dirname(__file__), '..', 'ogus', 'VERSION.txt')

# The package is documented from the source checkout.
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration -----------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.coverage',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
    'sphinx.ext.todo',
]

source_suffix = '.rst'
master_doc = 'index'

project = 'ogus'
copyright = '{year}, the ogus authors'.format(year=datetime.datetime.now().year)

# The short X.Y version.
with codecs.open(VERSION_FILE, encoding='ascii') as version_file:
    version = version_file.read().strip()
release = version

exclude_patterns = ['_build']

pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'alabaster'

htmlhelp_basename = 'ogusdoc'

autodoc_member_order = 'bysource'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'sympy': ('https://docs.sympy.org/latest', None),
}
