"""Bound states of ``-Δ - αF(|x|)`` on the plane, one angular channel at a time.

With ``r = e^t`` the channel ``m`` becomes the line operator
``-ω'' + (m² - α e^{2t} F(e^t)) ω``, so channel ``m`` is counted by the
line counter at ``κ = m``. Channels ``m >= 1`` appear twice (cos and sin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import radial2d_bound
from .errors import SpectraError
from .oscillate import Control, CountBracket, count_line
from .potential import Potential, log_transform
from .seq import growth_exponent


@dataclass(frozen=True)
class ChannelReport:
    m: int
    count: CountBracket
    multiplicity: int


@dataclass(frozen=True)
class RadialCount:
    lower: int
    upper: int
    channels: tuple[ChannelReport, ...]
    converged: bool

    @property
    def exact(self) -> bool:
        return self.lower == self.upper and self.converged

    def as_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "converged": self.converged,
            "channels": [{"m": c.m, "lower": c.count.lower, "upper": c.count.upper, "multiplicity": c.multiplicity} for c in self.channels],
        }


def _peak(F: Potential) -> float:
    """``sup_t e^{2t} F(e^t)``."""
    ls = math.log(F.length_scale)
    lo = ls - 40.0
    hi = ls + 40.0
    if F.support[1] < math.inf and F.support[1] > 0:
        hi = math.log(F.support[1])
    return max(F.tail_sup(lo), float(np.max(F.t2g(np.linspace(lo, hi, 20001)))))


def default_m_max(F: Potential, alpha: float) -> int:
    return int(math.ceil(math.sqrt(alpha * _peak(F)))) + 2


def count_radial(F: Potential, alpha: float, ctrl: Control | None = None) -> RadialCount:
    """Total count ``N_0 + 2 Σ_{m>=1} N_m`` with bracket arithmetic."""
    ctrl = ctrl or Control()
    if F.support[1] <= F.support[0]:
        return RadialCount(0, 0, (), True)
    G = log_transform(F, "derivation")
    m_max = ctrl.m_max if ctrl.m_max is not None else default_m_max(F, alpha)
    channels = []
    zeros = 0
    m = 0
    converged = False
    while m <= m_max:
        c = count_line(G, alpha, float(m), ctrl)
        channels.append(ChannelReport(m, c, 1 if m == 0 else 2))
        zeros = zeros + 1 if c.upper == 0 else 0
        if zeros >= 2:
            converged = True
            break
        m += 1
    lo = sum(ch.multiplicity * ch.count.lower for ch in channels)
    up = sum(ch.multiplicity * ch.count.upper for ch in channels)
    return RadialCount(lo, up, tuple(channels), converged)


@dataclass(frozen=True)
class PlanarRow:
    alpha: float
    exact_lower: int
    exact_upper: int
    bound: float
    bound_theorem: float
    dominated: bool
    dominated_theorem: bool | None


@dataclass(frozen=True)
class PlanarReport:
    rows: tuple[PlanarRow, ...]
    q_hat: float | None
    q_stderr: float | None
    all_dominated: bool

    def as_dict(self):
        return {
            "rows": [r.__dict__ for r in self.rows],
            "q_hat": self.q_hat,
            "q_stderr": self.q_stderr,
            "all_dominated": self.all_dominated,
        }


def validate_thm62(F: Potential, alpha_grid, ctrl: Control | None = None, constants=None) -> PlanarReport:
    """Exact channel-sum counts against the planar estimate under both conventions."""
    rows = []
    for a in alpha_grid:
        rc = count_radial(F, float(a), ctrl)
        bd = radial2d_bound(F, float(a), "derivation", constants)
        bt = radial2d_bound(F, float(a), "theorem", constants)
        dom = bd.value >= rc.upper
        dom_t = (bt.value >= rc.upper) if bt.applicable else None
        rows.append(PlanarRow(float(a), rc.lower, rc.upper, bd.value, bt.value, bool(dom), dom_t))
    q = se = None
    pts = [(r.alpha, r.exact_upper) for r in rows if r.exact_upper >= 1]
    if len(pts) >= 5:
        try:
            fit = growth_exponent(pts, decades=math.inf)
            q, se = fit.q_hat, fit.stderr
        except SpectraError:
            pass
    return PlanarReport(tuple(rows), q, se, all(r.dominated for r in rows))
