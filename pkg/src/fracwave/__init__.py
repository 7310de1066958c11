"""Fractional-derivative lossy wave models: time stepping, dispersion analysis and attenuation experiments."""

from .errors import ConfigError, ConvergenceError, FitError, NumericalError, StabilityError

__all__ = ["ConfigError", "ConvergenceError", "FitError", "NumericalError", "StabilityError"]
