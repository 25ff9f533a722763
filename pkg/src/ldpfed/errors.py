"""Exception types shared across the simulator."""


class LdpFedError(Exception):
    """Base class for all simulator errors."""


class BudgetError(LdpFedError):
    """Privacy budget is missing, non-positive, or non-finite."""


class ConfigError(LdpFedError):
    """Session configuration is inconsistent or incomplete."""


class EmptyDatasetError(LdpFedError):
    """Operation requires at least one training record."""


class ModelKindError(LdpFedError):
    """Operation is not defined for the given model kind."""


class NotTrainedError(LdpFedError):
    """Recovery requested before any training epoch has run."""
