"""Stochastic dynamic neural field simulation and reconstruction."""

from ._sdnf import *  # noqa: F401,F403
from ._sdnf import __doc__  # noqa: F401
