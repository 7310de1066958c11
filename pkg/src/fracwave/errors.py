"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A computation failed for numerical reasons (divergence, instability, empty band)."""


class StabilityError(NumericalError):
    """No time step passed the empirical stability probe."""

    def __init__(self, message, growth_factors=()):
        super().__init__(message)
        self.growth_factors = list(growth_factors)


class ConvergenceError(NumericalError):
    """An iterative root finder did not converge."""

    def __init__(self, message, iterates=()):
        super().__init__(message)
        self.iterates = list(iterates)


class FitError(NumericalError):
    """A power-law or exponential fit was given unusable data."""


class ConfigError(ValueError):
    """A run configuration is malformed or fails validation."""
