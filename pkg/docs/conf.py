# Sphinx configuration for the rcafmas documentation.
#
# Build with:
#
#   sphinx-build -b html docs docs/_build/html
#
# Full list of options: https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

from rcafmas import __version__

# -- Project ----------------------------------------------------------------

project = 'rcafmas'
copyright = '2022, rcafmas developers'
author = 'rcafmas developers'
version = __version__
release = __version__

# -- General ----------------------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.napoleon', 'sphinx.ext.mathjax',
              'sphinx.ext.viewcode', 'sphinx.ext.todo', 'sphinx_rtd_theme']

# Docstrings use Google style; skip the numpy-style parser
napoleon_numpy_docstring = False

autodoc_member_order = 'bysource'
templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

# Snippets pulled in by other pages are not standalone documents
exclude_patterns = ['_build', 'include/*.rst']

todo_include_todos = True

# -- HTML -------------------------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_options = {'display_version': True, 'prev_next_buttons_location': 'bottom'}
html_static_path = []
