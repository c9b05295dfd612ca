# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import sys
from pathlib import Path

# autodoc imports pycoarse from the repository root
sys.path.insert(0, str(Path(__file__).absolute().parent.parent))


# -- Project information -----------------------------------------------------

project = "pycoarse"
copyright = "2026, the pycoarse developers"
author = "the pycoarse developers"
release = "0.1"


# -- General configuration ---------------------------------------------------

extensions = ["sphinx.ext.autodoc", "sphinx.ext.autosummary"]
templates_path = ["_templates"]
exclude_patterns = [
    "_build",
    "Thumbs.db",
    ".DS_Store",
    "setup.py",
    "helper_funcs.py",
    "type_helpers.py",
    "rules.py",
    "cli.py",
]
autodoc_member_order = "bysource"


# -- Options for HTML output -------------------------------------------------

html_theme = "classic"
html_theme_options = {
    "stickysidebar": True,
    "sidebarbgcolor": "#2E3440",
    "relbarbgcolor": "#3B4252",
    "headbgcolor": "#3B4252",
    "headtextcolor": "#ECEFF4",
    "footerbgcolor": "#2E3440",
    "codebgcolor": "#ECEFF4",
}
pygments_style = "tango"
html_sidebars = {
    "**": ["globaltoc.html", "relations.html", "searchbox.html"]
}

master_doc = "index"
