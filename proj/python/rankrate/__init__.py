"""Bayesian mixture models for rankings and ratings."""

from ._core import *  # noqa: F401,F403
from ._core import Error, DataError, ConfigError, ModelError  # noqa: F401

__version__ = "0.1.0"
