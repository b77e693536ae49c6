"""Exception types shared across the solver; the CLI maps them to exit codes."""


class ConfigError(ValueError):
    """Invalid configuration or parameters (exit code 2)."""


class SetupError(RuntimeError):
    """Problem setup failed, e.g. an inadmissible projected equilibrium."""


class PositivityError(RuntimeError):
    """An inadmissible state was met where the theory forbids one (exit code 3)."""

    def __init__(self, message: str, where=None):
        super().__init__(message)
        self.where = where


class RuntimeLimitError(RuntimeError):
    """Step budget or wall-clock budget exhausted (exit code 4)."""
