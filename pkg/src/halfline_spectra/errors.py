"""Exception types raised across the package."""


class SpectraError(Exception):
    """Base class for errors raised by :mod:`halfline_spectra`."""


class DomainError(SpectraError, ValueError):
    """A point or mode lies outside the domain of a potential."""


class AccuracyError(SpectraError, ArithmeticError):
    """Quadrature or root finding did not reach the requested tolerance."""


class IntegrationError(SpectraError, ArithmeticError):
    """The Prüfer-angle ODE integration broke down."""


class InsufficientDataError(SpectraError, ValueError):
    """Too few samples or sequence entries for the requested estimate."""


class DegenerateFitError(SpectraError, ValueError):
    """A growth-exponent fit has no variation to fit."""


class ConfigError(SpectraError, ValueError):
    """A potential spec, constants file or sweep configuration is malformed."""
