"""Closed-form eigenvalue-count estimates and asymptotic coefficients.

Every estimate returns an :class:`EstimateReport`. Constants come in three
kinds: ``explicit`` (a number fixed by the inequality itself), ``calibrated``
(fitted on a potential corpus and stored in the constants file) and
``unknown-C`` (the inequality holds with some unnamed constant; the value
reported is the bare functional).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from ._quad import integrate_scalar, semi_infinite_shells
from .errors import AccuracyError, ConfigError, DomainError
from .potential import (
    Domain,
    Potential,
    ZetaMode,
    integrate_s_tail,
    is_monotone,
    log_transform,
    moment,
    sqrt_mass,
    zeta,
    zeta_half_sum,
)
from .seq import n_plus, weak_quasinorm


class Provenance(str, Enum):
    EXPLICIT = "explicit"
    CALIBRATED = "calibrated"
    UNKNOWN_C = "unknown-C"


@dataclass(frozen=True)
class EstimateReport:
    name: str
    value: float
    applicable: bool
    reason: str
    provenance: Provenance
    extra: Mapping | None = None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["provenance"] = self.provenance.value
        if d["extra"] is None:
            d.pop("extra")
        return d


# ---------------------------------------------------------------------------
# constants


def bump(t):
    """Test function for the lower bound: 1 on (1/2, 1), raised-cosine ramps out to 2^{-3/2} and 2^{1/2}."""
    t = np.asarray(t, dtype=float)
    a, b = 2.0**-1.5, 2.0**0.5
    left = 0.5 * (1 - np.cos(math.pi * (t - a) / (0.5 - a)))
    right = 0.5 * (1 + np.cos(math.pi * (t - 1.0) / (b - 1.0)))
    return np.where((t <= a) | (t >= b), 0.0, np.where(t < 0.5, left, np.where(t <= 1.0, 1.0, right)))


def bump_derivative(t):
    t = np.asarray(t, dtype=float)
    a, b = 2.0**-1.5, 2.0**0.5
    left = 0.5 * math.pi / (0.5 - a) * np.sin(math.pi * (t - a) / (0.5 - a))
    right = -0.5 * math.pi / (b - 1.0) * np.sin(math.pi * (t - 1.0) / (b - 1.0))
    return np.where((t <= a) | (t >= b), 0.0, np.where(t < 0.5, left, np.where(t <= 1.0, 0.0, right)))


def gamma_quadrature() -> float:
    """``∫ |f'|²`` for :func:`bump`, by quadrature."""
    return integrate_scalar(
        lambda t: float(bump_derivative(t)) ** 2, 2.0**-1.5, 2.0**0.5, points=(0.5, 1.0), rtol=1e-13
    )


GAMMA_CLOSED_FORM = math.pi**2 * (5 + 3 * math.sqrt(2)) / 8

_CONSTANT_KEYS = ("gamma", "C_dirichlet", "C_neumann", "C_line", "C_radial2d", "calibration_corpus_hash")


def default_constants_path() -> Path:
    return Path(str(resources.files("halfline_spectra") / "data" / "constants.json"))


@lru_cache(maxsize=8)
def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read constants file {path}: {exc}") from exc
    missing = [k for k in _CONSTANT_KEYS if k not in d]
    if missing:
        raise ConfigError(f"constants file {path} lacks {missing}")
    for k in _CONSTANT_KEYS[:-1]:
        v = d[k]
        if not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
            raise ConfigError(f"constant {k} must be a finite nonnegative number")
    return d


def load_constants(path: str | Path | None = None) -> dict:
    return dict(_load(str(path or default_constants_path())))


def _const(name: str, constants: Mapping | None) -> float:
    c = constants if constants is not None else load_constants()
    return float(c[name])


# ---------------------------------------------------------------------------
# estimates


def _half(P: Potential, what: str) -> None:
    if P.domain is not Domain.HALF:
        raise DomainError(f"{what} needs a half-line potential")


def bargmann(P: Potential, alpha: float) -> EstimateReport:
    """``α ∫ tG``."""
    _half(P, "bargmann")
    m1 = moment(P, 1)
    v = alpha * m1 if m1 > 0 else 0.0
    return EstimateReport("bargmann", v, True, "" if math.isfinite(v) else "first moment diverges", Provenance.EXPLICIT)


def calogero(P: Potential, alpha: float) -> EstimateReport:
    """``(2/π) α^{1/2} ∫ √G``, valid for non-increasing G."""
    _half(P, "calogero")
    v = 2.0 / math.pi * math.sqrt(alpha) * sqrt_mass(P)
    if not is_monotone(P):
        return EstimateReport("calogero", v, False, "G is not non-increasing", Provenance.EXPLICIT)
    return EstimateReport("calogero", v, True, "", Provenance.EXPLICIT)


@dataclass(frozen=True)
class BirmanBorzov:
    R: float
    S: float
    product_form: float
    sqrt_form: float
    phi_monotone: str
    provenance: Provenance = Provenance.UNKNOWN_C

    def as_dict(self):
        d = asdict(self)
        d["provenance"] = self.provenance.value
        return d


def _phi_direction(phi: Callable[[float], float]) -> str:
    t = np.geomspace(1e-6, 1e6, 2001)
    v = np.array([phi(x) for x in t], dtype=float)
    with np.errstate(invalid="ignore"):
        d = np.nan_to_num(np.diff(v), nan=0.0)
    if np.all(d >= 0):
        return "non-decreasing"
    if np.all(d <= 0):
        return "non-increasing"
    return "neither"


def _overflow_safe(phi):
    def f(t):
        try:
            return phi(t)
        except OverflowError:
            return math.inf

    return f


def birman_borzov(P: Potential, alpha: float, phi: Callable[[float], float]) -> BirmanBorzov:
    """``R = ∫ dt/φ`` and ``S = ∫ Gφ`` with both candidate forms of the estimate.

    Both ``α^{1/2} R S`` and ``α^{1/2} (RS)^{1/2}`` are returned; their
    constant is unknown.
    """
    _half(P, "birman_borzov")
    phi = _overflow_safe(phi)
    try:
        R = semi_infinite_shells(lambda t: 1.0 / phi(t))
    except AccuracyError:
        R = math.inf
    ls = math.log(P.length_scale)
    try:
        # capped so that an underflowed G times an overflowed φ reads as 0
        def w(s):
            with np.errstate(over="ignore"):
                return np.minimum(np.exp(-s) * np.vectorize(phi, otypes=[float])(np.exp(s)), 1e300)

        S = integrate_s_tail(P, w, ls, +1, None, what="S") + integrate_s_tail(P, w, ls, -1, None, what="S")
    except AccuracyError:
        S = math.inf
    RS = R * S if not (R == 0 or S == 0) else 0.0
    ra = math.sqrt(alpha)
    return BirmanBorzov(R, S, ra * RS, ra * math.sqrt(RS), _phi_direction(phi))


_MODE_CONST = {ZetaMode.DIRICHLET: "C_dirichlet", ZetaMode.NEUMANN: "C_neumann", ZetaMode.LINE: "C_line"}


def zeta_upper(P: Potential, alpha: float, mode="dirichlet", constants: Mapping | None = None) -> EstimateReport:
    """``offset + C α^{1/2} Σ ζ_j^{1/2}`` for the mode's ζ variant."""
    mode = ZetaMode(mode) if not isinstance(mode, ZetaMode) else mode
    if (mode is ZetaMode.LINE) != (P.domain is Domain.LINE):
        raise DomainError(f"mode {mode.value} does not match a {P.domain.value} potential")
    offset = 0.0 if mode is ZetaMode.DIRICHLET else 1.0
    C = _const(_MODE_CONST[mode], constants)
    total = zeta_half_sum(P, mode)
    name = f"zeta_upper_{mode.value}"
    if not math.isfinite(total):
        return EstimateReport(name, math.inf, False, "divergent: Σ ζ^{1/2} is infinite", Provenance.CALIBRATED, {"divergent": True})
    v = offset + C * math.sqrt(alpha) * total
    return EstimateReport(name, v, True, "", Provenance.CALIBRATED, {"divergent": False, "half_sum": total, "C": C})


def zeta_lower(P: Potential, s: float, constants: Mapping | None = None) -> int:
    """``⌈n_+(γ s, ζ)/2⌉``, a lower bound for ``n_+(s, T_G)``."""
    if s <= 0:
        raise ValueError("s must be positive")
    g = _const("gamma", constants)
    seq = zeta(P, "dirichlet", threshold=min(1e-14, 0.5 * g * s))
    return (n_plus(g * s, seq.entries) + 1) // 2


def weyl_term(P: Potential, alpha: float) -> float:
    """``π^{-1} α^{1/2} ∫ √G`` over the potential's domain."""
    return math.sqrt(alpha) / math.pi * sqrt_mass(P) if P.support[1] > P.support[0] else 0.0


def mar_bound(P: Potential, alpha: float) -> EstimateReport:
    """``1 + √(2α) (∫ t²G · ∫ G)^{1/4}`` for a line potential."""
    if P.domain is not Domain.LINE:
        raise DomainError("mar_bound needs a line potential")
    m0 = moment(P, 0)
    if m0 == 0:
        return EstimateReport("mar_bound", 1.0, True, "", Provenance.EXPLICIT)
    m2 = moment(P, 2)
    v = 1.0 + math.sqrt(2 * alpha) * (m2 * m0) ** 0.25
    return EstimateReport("mar_bound", v, True, "" if math.isfinite(v) else "a moment diverges", Provenance.EXPLICIT)


def radial2d_bound(F: Potential, alpha: float, convention: str = "derivation", constants: Mapping | None = None) -> EstimateReport:
    """``1 + α (∫ r F dr + C ‖ζ̂(G_F)‖_{1,∞})``."""
    _half(F, "radial2d_bound")
    C = _const("C_radial2d", constants)
    if F.support[1] <= F.support[0]:
        return EstimateReport("radial2d", 1.0, True, "", Provenance.CALIBRATED, {"C": C})
    m1 = moment(F, 1)
    if not math.isfinite(m1):
        return EstimateReport("radial2d", math.inf, False, "∫ r F dr diverges", Provenance.CALIBRATED)
    G = log_transform(F, convention)
    if G.zeta_half_summable() is False and convention == "theorem" and G._left_blows_up():
        return EstimateReport("radial2d", math.inf, False, "theorem-convention G_F grows on the left", Provenance.CALIBRATED)
    seq = zeta(G, "line")
    if not seq.closed_hi:
        return EstimateReport("radial2d", math.inf, False, "ζ̂ window did not close", Provenance.CALIBRATED)
    w = weak_quasinorm(seq.entries, 1.0)
    v = 1.0 + alpha * (m1 + C * w)
    return EstimateReport("radial2d", v, True, "", Provenance.CALIBRATED, {"C": C, "weak_l1": w, "moment": m1, "convention": convention})
