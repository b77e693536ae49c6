"""Positivity-preserving, well-balanced central DG solver for Euler equations with gravity."""
from .errors import ConfigError, PositivityError, RuntimeLimitError, SetupError
from .problems import build_solver, catalog, get_problem
from .stepper import LimiterConfig, StepControl

__all__ = [
    "ConfigError",
    "LimiterConfig",
    "PositivityError",
    "RuntimeLimitError",
    "SetupError",
    "StepControl",
    "build_solver",
    "catalog",
    "get_problem",
]
__version__ = "0.1.0"
