"""Frequency-domain acoustic echo cancellation with closed-loop learning-rate control."""

from .canceller import CancellerConfig, EchoCanceller, FrameDiagnostics
from .errors import ConfigError, ContractError, HermitianError, SizeMismatchError
from .mdf import MdfFilter

__all__ = [
    "CancellerConfig",
    "ConfigError",
    "ContractError",
    "EchoCanceller",
    "FrameDiagnostics",
    "HermitianError",
    "MdfFilter",
    "SizeMismatchError",
]

__version__ = "0.1.0"
