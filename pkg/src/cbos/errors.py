"""Exception types shared across the package."""


class CBOSError(Exception):
    """Base class for all errors raised by this package."""


class DataError(CBOSError, ValueError):
    """Input data violates a contract (bad CSV, non-binary labels, too few rows...)."""


class ConfigError(CBOSError, ValueError):
    """A parameter or experiment configuration is invalid."""
