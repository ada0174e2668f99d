class SizeMismatchError(ValueError):
    """A block or spectrum does not have the length the engine was built for."""


class HermitianError(ValueError):
    """A spectrum that should come from a real signal is not Hermitian-symmetric."""


class ContractError(ValueError):
    """An argument violates an operation's precondition (e.g. a rate outside [0, 1])."""


class ConfigError(ValueError):
    """Invalid canceller or scenario configuration."""
