"""Errors that map to distinct CLI exit codes."""


class ConfigError(ValueError):
    """Invalid run configuration or schema violation."""


class BudgetExceededError(RuntimeError):
    """A sample, experiment, step, or enumeration budget would be exceeded."""


class PromiseViolationError(RuntimeError):
    """An oracle check found a trial instance outside its promised regime."""
