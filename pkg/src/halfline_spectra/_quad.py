"""Adaptive quadrature helpers shared by the potential, bounds and bsop modules."""

from __future__ import annotations

import math
import warnings
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

from .errors import AccuracyError

DEFAULT_RTOL = 1e-10

# Gauss-Legendre rules used by the vectorised element integrator.
_GL_LO = np.polynomial.legendre.leggauss(8)
_GL_HI = np.polynomial.legendre.leggauss(16)


def _quad_piece(f, a, b, rtol, atol, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            f, a, b, epsrel=rtol, epsabs=atol, limit=limit, full_output=True
        )[:3]
    return val, err


def integrate_scalar(
    f: Callable[[float], float],
    a: float,
    b: float,
    points: Iterable[float] = (),
    rtol: float = DEFAULT_RTOL,
    atol: float = 0.0,
    limit: int = 200,
    what: str = "integral",
) -> float:
    """Integrate a scalar function over ``(a, b)``, splitting at ``points``.

    Infinite endpoints are passed to QUADPACK's transformed rules. Raises
    :class:`AccuracyError` when the reported error estimate is far above
    the requested tolerance.
    """
    if a == b:
        return 0.0
    if a > b:
        return -integrate_scalar(f, b, a, points, rtol, atol, limit, what)
    cuts = sorted({p for p in points if a < p < b and math.isfinite(p)})
    edges = [a, *cuts, b]
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _quad_piece(f, lo, hi, rtol, atol, limit)
        if not math.isfinite(val):
            return val
        total += val
        total_err += err
    scale = max(abs(total), atol)
    if total_err > max(1e3 * rtol * scale, 10 * atol, 1e-300):
        raise AccuracyError(f"{what}: quadrature error {total_err:.3g} on value {total:.6g}")
    return total


def semi_infinite_shells(
    f: Callable[[float], float],
    rtol: float = DEFAULT_RTOL,
    max_shells: int = 200,
) -> float:
    """``∫_0^∞ f`` summed over dyadic shells in both directions from t=1.

    Returns ``inf`` when the shells fail to die out within ``max_shells`` on
    either side; used where no analytic convergence predicate is available.
    """
    total = integrate_scalar(f, 0.5, 1.0, rtol=rtol)
    for direction in (+1, -1):
        quiet = 0
        k = 0
        while quiet < 3:
            k += 1
            if k > max_shells:
                return math.inf
            if direction > 0:
                lo, hi = 2.0 ** (k - 1), 2.0**k
            else:
                lo, hi = 2.0 ** (-k - 1), 2.0 ** (-k)
            shell = integrate_scalar(f, lo, hi, rtol=rtol)
            total += shell
            if not math.isfinite(total):
                return math.inf
            quiet = quiet + 1 if abs(shell) <= rtol * abs(total) else 0
    return total


def element_integrals(
    g: Callable[[np.ndarray], np.ndarray],
    left: np.ndarray,
    right: np.ndarray,
    rtol: float = 1e-10,
    max_depth: int = 30,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-element ``∫ g φ_L²``, ``∫ g φ_L φ_R``, ``∫ g φ_R²`` for P1 hats.

    ``g`` must be vectorised. Elements whose 8- and 16-point Gauss-Legendre
    values disagree are bisected until they agree or ``max_depth`` is hit.
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    n = left.size
    out = np.zeros((3, n))
    # Work list of sub-elements: (owner index, sub-left, sub-right).
    owner = np.arange(n)
    lo, hi = left.copy(), right.copy()
    for _ in range(max_depth + 1):
        if owner.size == 0:
            break
        v_lo = _gl_moments(g, left[owner], right[owner], lo, hi, _GL_LO)
        v_hi = _gl_moments(g, left[owner], right[owner], lo, hi, _GL_HI)
        scale = np.abs(v_hi).max(axis=0)
        bad = np.abs(v_hi - v_lo).max(axis=0) > rtol * scale + 1e-300
        good = ~bad
        np.add.at(out, (slice(None), owner[good]), v_hi[:, good])
        if not bad.any():
            owner = owner[:0]
            break
        mid = 0.5 * (lo[bad] + hi[bad])
        owner = np.concatenate([owner[bad], owner[bad]])
        lo, hi = np.concatenate([lo[bad], mid]), np.concatenate([mid, hi[bad]])
    if owner.size:
        v = _gl_moments(g, left[owner], right[owner], lo, hi, _GL_HI)
        np.add.at(out, (slice(None), owner), v)
    return out[0], out[1], out[2]


def _gl_moments(g, el_left, el_right, lo, hi, rule):
    nodes, weights = rule
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo)[None, :] + half[None, :] * nodes[:, None]
    h = el_right - el_left
    phi_r = (x - el_left[None, :]) / h[None, :]
    phi_l = 1.0 - phi_r
    gw = g(x) * (weights[:, None] * half[None, :])
    return np.stack(
        [
            (gw * phi_l * phi_l).sum(axis=0),
            (gw * phi_l * phi_r).sum(axis=0),
            (gw * phi_r * phi_r).sum(axis=0),
        ]
    )
