#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# gyromag documentation build configuration file.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

import gyromag

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode', 'sphinx_rtd_theme']
autodoc_member_order = 'bysource'

source_suffix = '.rst'
master_doc = 'index'

project = u'GYROMAG'
copyright = u"2026, The gyromag developers"
author = u"The gyromag developers"

version = gyromag.__version__
release = gyromag.__version__

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'gyromagdoc'

man_pages = [
    (master_doc, 'gyromag', u'GYROMAG Documentation', [author], 1)
]
