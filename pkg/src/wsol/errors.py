"""Exception types shared across the package.

The CLI maps these onto its exit codes (input 1, config 2, verification 3,
divergence 4), so library code should raise the most specific type it can.
"""


class WsolError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(WsolError):
    """A value object or argument violates a documented precondition."""


class InputError(WsolError):
    """A data file is malformed, empty, or holds out-of-domain values."""


class ConfigError(WsolError):
    """A config document is malformed or holds unknown keys."""


class UnsupportedCombinationError(ConfigError):
    """A weight/prior combination with no supported closed form."""


class DegenerateDenominatorError(WsolError):
    """A score partial derivative was requested at a zero denominator."""


class TrainingDivergedError(WsolError):
    """Training produced a non-finite loss; carries the epoch index."""

    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(message or f"non-finite loss at epoch {epoch}")
