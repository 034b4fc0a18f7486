"""Reducibility and Sobolev-growth experiments for the driven quantum oscillator.

The heavy lifting lives in the compiled extension `oscine._core`; this package
re-exports its public surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
