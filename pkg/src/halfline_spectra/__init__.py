"""Bound-state counting and spectral estimates for one-dimensional Schrödinger operators."""

from .errors import (
    AccuracyError,
    ConfigError,
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    IntegrationError,
    SpectraError,
)
from .potential import (
    Domain,
    ExpDecay,
    Gaussian,
    HardyTail,
    LogBorderline,
    PiecewiseConstant,
    Potential,
    PowerTail,
    Sampled,
    SquareWell,
    Zero,
    ZetaMode,
    ZetaSequence,
    load_potential,
    log_transform,
    moment,
    sqrt_mass,
    zeta,
)

__version__ = "0.1.0"
