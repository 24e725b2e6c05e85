"""Conic robustness quantifiers of Buscemi nonlocality and their games."""

from ._nlforge import *  # noqa: F401,F403
from ._nlforge import __version__  # noqa: F401
