class ConfigurationError(ValueError):
    """Invalid configuration value (qubit count, hyperparameter, config key)."""


class UsageError(RuntimeError):
    """An object was used out of protocol, e.g. stepping a finished episode."""
