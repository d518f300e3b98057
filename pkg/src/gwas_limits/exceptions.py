class InfeasibleError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its evaluation budget."""


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""
