"""Inverted harmonic oscillator numerics: Dyson map, coherent states, verification."""

from ._ihox import *  # noqa: F401,F403
from ._ihox import __doc__  # noqa: F401
