"""Weak-ℓ_q analytics on finite nonnegative sequences and power-law fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateFitError, InsufficientDataError


def _clean(x) -> np.ndarray:
    a = np.abs(np.asarray(x, dtype=float).ravel())
    return a[np.isfinite(a)]


def n_plus(s: float, x) -> int:
    """Number of entries strictly above ``s``."""
    if s <= 0:
        raise ValueError("n_plus needs s > 0")
    return int(np.count_nonzero(_clean(x) > s))


def weak_quasinorm(x, q: float) -> float:
    """``sup_s s^q n_+(s, x)`` for a finite sequence.

    The supremum is approached as ``s`` rises to an entry value, so it equals
    ``max_k x_(k)^q k`` with ``x`` sorted in decreasing order. This is the
    q-th power of the usual quasi-norm.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    a = np.sort(_clean(x))[::-1]
    a = a[a > 0]
    if a.size == 0:
        return 0.0
    # ties: the rank that counts for value v is the last index holding v
    ranks = np.arange(1, a.size + 1)
    return float(np.max(a**q * ranks))


def lq_quasinorm(x, q: float) -> float:
    """``(Σ |x_k|^q)^{1/q}``."""
    if q <= 0:
        raise ValueError("q must be positive")
    a = _clean(x)
    return float(np.sum(a**q) ** (1.0 / q))


@dataclass(frozen=True)
class TailReport:
    q: float
    weak_qnorm_q: float
    delta_upper: float
    delta_lower: float
    window: tuple[float, float]
    n_candidates: int

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "weak_qnorm_q": self.weak_qnorm_q,
            "delta_upper": self.delta_upper,
            "delta_lower": self.delta_lower,
            "window": list(self.window),
            "n_candidates": self.n_candidates,
            "note": "finite-window estimates",
        }


def tail_functionals(x, q: float, fit_window: tuple[float, float] | None = None) -> TailReport:
    """Finite-window estimates of ``limsup`` / ``liminf`` of ``s^q n_+(s, x)``.

    Over each gap between consecutive distinct values ``v_(i+1) < v_(i)``
    the count is constant, so ``s^q n_+`` sweeps from ``v_(i+1)^q c_i`` up to
    ``v_(i)^q c_i``. The upper estimate is the largest right-end value and
    the lower estimate the smallest left-end value, over gaps whose upper
    value lies in ``fit_window`` (default: the smallest decade of distinct
    positive values). The gap below the smallest value is excluded.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    a = _clean(x)
    a = a[a > 0]
    vals, counts = np.unique(a, return_counts=True)
    vals, counts = vals[::-1], counts[::-1]
    cum = np.cumsum(counts)
    if fit_window is None:
        if vals.size == 0:
            raise InsufficientDataError("sequence has no positive entries")
        lo, hi = vals[-1], vals[-1] * 10.0
    else:
        lo, hi = fit_window
    inside = (vals >= lo) & (vals <= hi)
    idx = np.nonzero(inside)[0]
    if idx.size < 3:
        raise InsufficientDataError(f"window [{lo:.3g}, {hi:.3g}] holds {idx.size} distinct entries, need 3")
    # gaps (v_(i+1), v_(i)) for i in idx with a successor
    gaps = idx[idx + 1 < vals.size]
    up = vals[gaps] ** q * cum[gaps]
    down = vals[gaps + 1] ** q * cum[gaps]
    if gaps.size == 0:
        up = down = vals[idx] ** q * cum[idx]
    delta_upper = float(np.max(up))
    delta_lower = float(min(np.min(down), delta_upper))
    return TailReport(q, weak_quasinorm(a, q), delta_upper, delta_lower, (float(lo), float(hi)), int(idx.size))


@dataclass(frozen=True)
class GrowthFit:
    q_hat: float
    stderr: float
    n_points: int
    alpha_range: tuple[float, float]

    def __iter__(self):
        yield self.q_hat
        yield self.stderr


def growth_exponent(samples: Iterable[tuple[float, float]], decades: float = 1.0, min_points: int = 5) -> GrowthFit:
    """Least-squares slope of ``log N`` against ``log α``.

    The fit uses samples within ``decades`` of the largest α; if fewer than 3
    fall there, all samples are used.
    """
    pts = [(float(a), float(n)) for a, n in samples]
    if len(pts) < min_points:
        raise InsufficientDataError(f"growth fit needs >= {min_points} samples, got {len(pts)}")
    alpha = np.array([p[0] for p in pts])
    N = np.array([p[1] for p in pts])
    if np.any(np.diff(alpha) <= 0):
        raise ValueError("alpha must be strictly increasing")
    if np.all(N == N[0]):
        raise DegenerateFitError("all counts are equal; no growth to fit")
    if np.any(N < 1):
        raise InsufficientDataError("growth fit needs N >= 1 at every sample")
    keep = alpha >= alpha[-1] / 10.0**decades
    if keep.sum() < 3:
        keep = np.ones_like(keep)
    x, y = np.log(alpha[keep]), np.log(N[keep])
    if np.ptp(y) == 0:
        raise DegenerateFitError("counts are constant over the fit window")
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    n = x.size
    resid = y - A @ coef
    dof = max(n - 2, 1)
    sxx = np.sum((x - x.mean()) ** 2)
    stderr = math.sqrt(np.sum(resid**2) / dof / sxx) if sxx > 0 else math.inf
    return GrowthFit(float(coef[0]), float(stderr), int(n), (float(alpha[keep][0]), float(alpha[keep][-1])))


def predicted_exponent(zeta_entries, half_summable: bool, q_grid: Sequence[float] | None = None) -> float:
    """Growth exponent suggested by a ζ window.

    ``1/2`` when ``Σ ζ^{1/2}`` converges. Otherwise the tail decay of the
    sorted entries, ``x_(k) ~ k^{-1/q}``, gives ``q`` as minus the inverse
    log-log slope over the lower half of the sorted window.
    """
    if half_summable:
        return 0.5
    a = np.sort(_clean(zeta_entries))[::-1]
    a = a[a > 0]
    if a.size < 8:
        raise InsufficientDataError("too few entries to read a tail exponent")
    k = np.arange(1, a.size + 1)
    lo = a.size // 4
    x, y = np.log(k[lo:]), np.log(a[lo:])
    slope = np.polyfit(x, y, 1)[0]
    if slope >= 0:
        return math.inf
    return float(max(-1.0 / slope, 0.5))
