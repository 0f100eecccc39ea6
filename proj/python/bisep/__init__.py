"""Sparse canonical pair recovery: bilateral stagewise pursuit and a truncated power baseline."""

from ._bisep import *  # noqa: F401,F403
from ._bisep import __doc__  # noqa: F401

__version__ = "0.1.0"
