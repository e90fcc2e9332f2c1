"""Bisimulation metrics, optimal transport and state aggregation for finite MDPs."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
