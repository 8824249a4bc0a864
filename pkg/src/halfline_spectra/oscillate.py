"""Bound-state counting for ``-u'' - αG u`` by Prüfer-angle integration.

The zero-energy solution is written as ``u = r sin θ``, ``u' = r cos θ``, so
``θ' = cos²θ + (W - κ²) sin²θ`` with ``W = αG``. The angle can only cross a
multiple of π upwards, hence the number of zeros up to ``x`` is
``floor(θ(x)/π)`` and no per-step crossing search is needed.

Integration stops at a finite cutoff. What the tail beyond the cutoff can
still contribute is bounded by the certificates in :func:`_free_tail` and
:func:`_massive_tail`, which produce an integer bracket on the count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.integrate import ode

from .errors import ConfigError, DomainError, IntegrationError
from .potential import (
    Domain,
    HalfView,
    LogTransformed,
    Potential,
    integrate_s,
    integrate_s_tail,
    line_breakpoints,
    tail_finite,
)

PI = math.pi


@dataclass(frozen=True)
class Control:
    """Tolerances and resource limits for the counters."""

    ode_rel_tol: float = 1e-8
    T_max: float = 1e6
    t0_min: float = 1e-12
    coords: str = "auto"
    S_max: float = 1e7
    m_max: int | None = None

    def __post_init__(self):
        if self.coords not in ("auto", "linear", "log"):
            raise ConfigError("coords must be auto, linear or log")
        if not 0 < self.ode_rel_tol < 1e-2:
            raise ConfigError("ode_rel_tol must lie in (0, 1e-2)")


@dataclass(frozen=True)
class CountBracket:
    """Integer bracket ``lower <= N <= upper``; ``upper`` may be ``inf``."""

    lower: int
    upper: int | float
    alpha: float
    truncation_T: float
    tail_bound: float
    coords: str
    bc: str = "dirichlet"
    note: str = ""

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> int:
        if not self.exact:
            raise ValueError(f"count not certified: [{self.lower}, {self.upper}]")
        return int(self.lower)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n_lower": self.lower,
            "n_upper": self.upper,
            "tail_bound": self.tail_bound,
            "coords": self.coords,
            "truncation_T": self.truncation_T,
            "exact": self.exact,
            "bc": self.bc,
        }


@dataclass(frozen=True)
class PruferTrace:
    nodes: np.ndarray
    bc: str

    @property
    def t(self) -> np.ndarray:
        return self.nodes[:, 0]

    @property
    def theta(self) -> np.ndarray:
        return self.nodes[:, 1]


# ---------------------------------------------------------------------------
# angle flow


class _Flow:
    """Integrates one or more Prüfer angles through the same coefficient."""

    def __init__(
        self,
        W: Callable[[float], float],
        kappa2: float,
        rtol: float,
        breaks: Sequence[float] = (),
        chunk: float = math.inf,
    ):
        self.W = W
        self.chunk = chunk
        self.k2 = kappa2
        self.rtol = rtol
        self.atol = rtol
        self.breaks = sorted(breaks)
        self.record: list[tuple[float, float]] | None = None

    def _rhs(self, x, y):
        q = self.W(x) - self.k2
        out = []
        for th in y:
            s = math.sin(th)
            c = math.cos(th)
            out.append(c * c + q * s * s)
        return out

    def _piece(self, y, a, b, max_step):
        r = ode(self._rhs)
        r.set_integrator("dop853", rtol=self.rtol, atol=self.atol, nsteps=10**9, max_step=max_step)
        if self.record is not None:
            rec = self.record

            def solout(x, yy):
                rec.append((x, yy[0]))

            r.set_solout(solout)
        r.set_initial_value(list(y), a)
        out = r.integrate(b)
        if not r.successful() or not np.all(np.isfinite(out)):
            raise IntegrationError(f"angle integration broke down near x={r.t:.6g}")
        return [float(v) for v in out]

    def advance(self, y, a: float, b: float, max_step: float | None = None) -> list[float]:
        if b <= a:
            return list(y)
        ms = max_step if max_step is not None else (b - a) / 16.0
        cuts = [x for x in self.breaks if a < x < b]
        if math.isfinite(self.chunk) and b - a > self.chunk:
            # fresh integrator objects reset dop853's stiffness counter
            cuts = sorted(set(cuts) | set(np.arange(a + self.chunk, b, self.chunk).tolist()))
        edges = [a, *cuts, b]
        for lo, hi in zip(edges[:-1], edges[1:]):
            y = self._piece(y, lo, hi, min(ms, hi - lo))
        return y


# ---------------------------------------------------------------------------
# tail certificates


def _tail_moments(P: Potential, alpha: float, R: float, side: int = 1) -> tuple[float, float]:
    """``α ∫_R^∞ G(±x)`` and ``α ∫_R^∞ (x - R) G(±x)`` for ``R > 0``."""
    lr = math.log(R)
    m0 = integrate_s_tail(P, lambda s: np.exp(-s), lr, +1, tail_finite(P, 0), side, what="tail mass")
    m1 = integrate_s_tail(P, lambda s, R=R: 1.0 - R * np.exp(-s), lr, +1, tail_finite(P, 1), side, what="tail moment")
    return alpha * m0, alpha * max(m1, 0.0)


def _free_tail(theta: float, M0: float, M1: float) -> tuple[int, float, float]:
    """Bracket for the zeros of a κ = 0 solution given ``θ`` at the cutoff.

    Returns ``(lower, upper, tail_bound)``. The solution has no further zero
    when ``M1 + tan φ · M0 < 1`` and ``φ < π/2`` (compare with its tangent
    line), exactly one when ``φ > π/2`` and ``M1 < 1``, and at most
    ``1 + floor(M1)`` in general (Bargmann on the tail).
    """
    m = math.floor(theta / PI)
    phi = theta - m * PI
    lower = m + (1 if phi > PI / 2 else 0)
    if phi < PI / 2:
        tb = M1 + (math.tan(phi) * M0 if M0 > 0 else 0.0)
    elif phi == PI / 2:
        tb = M1 if M0 == 0 else math.inf
    else:
        tb = M1
    if tb < 1:
        upper = lower
    else:
        upper = m + 1 + math.floor(M1) if math.isfinite(M1) else math.inf
    return lower, upper, tb


def _massive_tail(theta: float, kappa: float, Wsup: float) -> tuple[int, float, float]:
    """Bracket for a κ > 0 solution when ``W <= Wsup < κ²`` beyond the cutoff.

    With ``y = cot θ`` one has ``y' = κ² - W - y²``; above ``-κ_lo`` the
    solution never vanishes again, below ``-κ`` it vanishes exactly once.
    """
    m = math.floor(theta / PI)
    phi = theta - m * PI
    if Wsup >= kappa * kappa:
        return m, math.inf, math.inf
    klo = math.sqrt(kappa * kappa - Wsup)
    y = math.cos(phi) / math.sin(phi) if phi > 0 else math.inf
    if y > -klo:
        return m, m, 0.0
    if y < -kappa:
        return m + 1, m + 1, 0.0
    return m, m + 1, 1.0


def _combine(parts: Sequence[tuple[int, float, float]]) -> tuple[int, float, float]:
    return min(p[0] for p in parts), max(p[1] for p in parts), max(p[2] for p in parts)


def _side_sup(P: Potential, R: float, side: int) -> float:
    """Upper bound for ``G(side * x)`` over ``x >= R``."""
    if isinstance(P, LogTransformed):
        return P.right_sup(R) if side > 0 else P.left_sup(-R)
    lr = math.log(R)
    return P.tail_sup(lr) / (R * R)


def _targets(x0: float, limit: float) -> Iterator[float]:
    x = x0
    while x < limit:
        yield x
        x *= 2.0
    yield limit


# ---------------------------------------------------------------------------
# half-line


def _initial_half(P: Potential, alpha: float, bc: str, ctrl: Control) -> tuple[float, list[float]]:
    if bc == "neumann":
        if P.singular_at_zero:
            raise DomainError("Neumann counting needs G integrable at 0")
        return 0.0, [PI / 2]
    if not P.singular_at_zero:
        return 0.0, [0.0]
    # Dirichlet with a singularity at 0: start at t0 with an angle bracket
    t0 = 1e-3 * P.length_scale
    while True:
        m1 = alpha * integrate_s_tail(P, lambda s: 1.0, math.log(t0), -1, True, what="head moment")
        if m1 < 1e-6 or t0 <= ctrl.t0_min:
            break
        t0 = max(t0 * 1e-2, ctrl.t0_min)
    if m1 >= 1:
        raise IntegrationError(f"singularity at 0 too strong: α∫_0^{t0:.3g} tG = {m1:.3g}")
    return t0, [math.atan((1 - m1) * t0), math.atan(t0 / (1 - m1))]


def _count_linear(P: Potential, alpha: float, bc: str, ctrl: Control) -> CountBracket:
    x, th = _initial_half(P, alpha, bc, ctrl)
    flow = _Flow(lambda t: alpha * P.scalar(t), 0.0, ctrl.ode_rel_tol, P.breakpoints)
    hi = P.support[1]
    start = hi if math.isfinite(hi) else 4.0 * P.length_scale
    if start <= x:
        start = x + P.length_scale
    res = None
    for X in _targets(start, ctrl.T_max):
        th = flow.advance(th, x, X, max_step=max(X - x, 1e-300) / 32.0)
        x = X
        if math.isfinite(hi) and X >= hi:
            M0 = M1 = 0.0
        else:
            M0, M1 = _tail_moments(P, alpha, X)
        res = _combine([_free_tail(t, M0, M1) for t in th])
        if res[0] == res[1]:
            break
    lo, up, tb = res
    return CountBracket(lo, up, alpha, x, tb, "linear", bc)


def _count_log(P: Potential, alpha: float, bc: str, ctrl: Control) -> CountBracket:
    """Linear coordinates up to ``t1``, then ``s = ln t`` with κ = 1/2."""
    x, th = _initial_half(P, alpha, bc, ctrl)
    lo_t = P.support[0]
    t1 = max(P.length_scale, lo_t, x * 4, 1e-300)
    lin = _Flow(lambda t: alpha * P.scalar(t), 0.0, ctrl.ode_rel_tol, P.breakpoints)
    th = lin.advance(th, x, t1, max_step=(t1 - x) / 32.0)
    # change variables: w = t^{-1/2} u, y = w_s / w = t u'/u - 1/2
    conv = []
    for t in th:
        m = math.floor(t / PI)
        phi = t - m * PI
        conv.append(m * PI + math.atan2(math.sin(phi), t1 * math.cos(phi) - 0.5 * math.sin(phi)))
    th = conv
    s = math.log(t1)
    sbreaks = [math.log(b) for b in P.breakpoints if b > t1]
    flow = _Flow(lambda z: alpha * P.t2g_scalar(z), 0.25, ctrl.ode_rel_tol, sbreaks, chunk=64.0)
    S = s + 2.0
    res = (0, math.inf, math.inf)
    while True:
        th = flow.advance(th, s, S, max_step=min(max((S - s) / 32.0, 1e-3), 4.0))
        s = S
        Wsup = alpha * P.tail_sup(S)
        res = _combine([_massive_tail(t, 0.5, Wsup) for t in th])
        if res[0] == res[1] or S >= ctrl.S_max:
            break
        if Wsup < 0.125:
            # the angle now relaxes towards cot θ = √(1/4 - W); a short step suffices
            S = min(S + 8.0, ctrl.S_max)
        else:
            S = min(S + max(S, 4.0), ctrl.S_max)
            if alpha * P.tail_sup(S) < 0.125:
                S = _first_below(lambda z: alpha * P.tail_sup(z), 0.125, s, S)
    lo, up, tb = res
    # truncation_T is reported in the native coordinate s = ln t
    return CountBracket(lo, up, alpha, s, tb, "log", bc)


def _first_below(f, level, a, b, iters=60):
    """Smallest point (to bisection accuracy) in ``[a, b]`` with ``f < level``; f nonincreasing."""
    for _ in range(iters):
        m = 0.5 * (a + b)
        if f(m) < level:
            b = m
        else:
            a = m
        if b - a < 1e-6 * max(1.0, abs(b)):
            break
    return b


# ---------------------------------------------------------------------------
# whole line


def _count_line(P: Potential, alpha: float, kappa: float, ctrl: Control) -> CountBracket:
    if P.domain is not Domain.LINE:
        raise DomainError("line counting needs a line potential")
    hi = P.support[1]
    flow = _Flow(lambda x: alpha * P.scalar(x), kappa * kappa, ctrl.ode_rel_tol, line_breakpoints(P))
    base = hi if math.isfinite(hi) else 4.0 * P.length_scale
    tight = 1e-6
    last = None
    for attempt in range(6):
        # left end: bracket the solution that stays bounded at -∞
        RL = base
        while True:
            if math.isfinite(hi) and RL >= hi:
                lo_th, hi_th = (PI / 2, PI / 2) if kappa == 0 else (math.atan2(1, kappa),) * 2
                break
            if kappa == 0:
                M0L, M1L = _tail_moments(P, alpha, RL, side=-1)
                if M1L < 0.5 and M0L / (1 - M1L) < tight:
                    lo_th, hi_th = PI / 2, PI / 2 + math.atan(M0L / (1 - M1L))
                    break
            else:
                Ws = alpha * _side_sup(P, RL, -1)
                if Ws < tight * kappa * kappa:
                    klo = math.sqrt(kappa * kappa - Ws)
                    lo_th, hi_th = math.atan2(1, kappa), math.atan2(1, klo)
                    break
            if RL >= ctrl.T_max:
                return CountBracket(0, math.inf, alpha, RL, math.inf, "linear", "line", "left tail not certified")
            RL *= 2.0
        th = [lo_th] if lo_th == hi_th else [lo_th, hi_th]
        x = -RL
        res = None
        for X in _targets(base, ctrl.T_max):
            th = flow.advance(th, x, X, max_step=(X - x) / 64.0)
            x = X
            if kappa == 0:
                if math.isfinite(hi) and X >= hi:
                    M0 = M1 = 0.0
                else:
                    M0, M1 = _tail_moments(P, alpha, X, side=1)
                parts = [_free_tail(t, M0, M1) for t in th]
            else:
                Wsup = alpha * _side_sup(P, X, 1)
                parts = [_massive_tail(t, kappa, Wsup) for t in th]
            res = _combine(parts)
            if res[0] == res[1] or all(p[0] == p[1] for p in parts):
                break
        last = CountBracket(res[0], res[1], alpha, x, res[2], "linear", "line")
        if last.exact or not all(p[0] == p[1] for p in parts):
            return last
        # each end is certified but they disagree: tighten the left bracket
        tight *= 1e-3
    return last


# ---------------------------------------------------------------------------
# public API


def _norm_bc(bc: str) -> str:
    b = str(bc).lower()
    if b not in ("dirichlet", "neumann", "line"):
        raise ConfigError(f"unknown boundary mode {bc!r}")
    return b


def count_bound_states(P: Potential, alpha: float, bc: str = "dirichlet", ctrl: Control | None = None) -> CountBracket:
    """Bracket on the number of negative eigenvalues of ``-u'' - αG u``.

    ``bc`` selects Dirichlet or Neumann at ``t = 0`` on the half-line, or the
    operator on the whole line. With ``coords='auto'`` the half-line counter
    uses linear coordinates when the first moment converges and falls back
    to logarithmic coordinates when the linear tail cannot be certified.
    """
    ctrl = ctrl or Control()
    bc = _norm_bc(bc)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return _refined(lambda c: _count_dispatch(P, alpha, bc, c), ctrl)


# Above this many zeros the accumulated phase error of a single run is not
# trusted; the count is repeated at a tighter tolerance until it repeats.
_RECHECK_ABOVE = 16


def _refined(run: Callable[[Control], CountBracket], ctrl: Control) -> CountBracket:
    import dataclasses

    res = run(ctrl)
    tol = ctrl.ode_rel_tol
    while res.exact and res.lower >= _RECHECK_ABOVE and tol > 1e-13:
        tol = max(tol * 1e-2, 1e-13)
        again = run(dataclasses.replace(ctrl, ode_rel_tol=tol))
        if again.lower == res.lower and again.upper == res.upper:
            return again
        res = again
    return res


def _count_dispatch(P: Potential, alpha: float, bc: str, ctrl: Control) -> CountBracket:
    if bc == "line":
        res = _count_line(P, alpha, 0.0, ctrl)
        if res.exact or not P.even:
            return res
        return _count_parity(P, alpha, ctrl, res)
    if P.domain is not Domain.HALF:
        raise DomainError(f"{bc} counting needs a half-line potential")
    if ctrl.coords == "log":
        return _count_log(P, alpha, bc, ctrl)
    if ctrl.coords == "linear" or P.moment_finite(1) is not False:
        res = _count_linear(P, alpha, bc, ctrl)
        if res.exact or ctrl.coords == "linear":
            return res
    return _count_log(P, alpha, bc, ctrl)


def _count_parity(P: Potential, alpha: float, ctrl: Control, direct: CountBracket) -> CountBracket:
    """Even potential: odd states are Dirichlet states of the half, even ones Neumann."""
    half = HalfView(base=P, side=1)
    d = _count_dispatch(half, alpha, "dirichlet", ctrl)
    n = _count_dispatch(half, alpha, "neumann", ctrl)
    lo = max(d.lower + n.lower, direct.lower)
    up = min(d.upper + n.upper, direct.upper)
    tb = max(d.tail_bound, n.tail_bound)
    return CountBracket(lo, up, alpha, max(d.truncation_T, n.truncation_T), tb, d.coords, "line", "parity split")


def count_line(P: Potential, alpha: float, kappa: float = 0.0, ctrl: Control | None = None) -> CountBracket:
    """Eigenvalues below 0 of ``-w'' + (κ² - αG) w`` on the line."""
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    return _refined(lambda c: _count_line(P, alpha, float(kappa), c), ctrl or Control())


def prufer_trace(
    P: Potential, alpha: float, bc: str = "dirichlet", ctrl: Control | None = None, T: float | None = None
) -> PruferTrace:
    """Accepted ODE steps ``(t, θ)`` of the half-line angle on ``[0, T]``."""
    ctrl = ctrl or Control()
    bc = _norm_bc(bc)
    if bc == "line":
        raise ConfigError("prufer_trace covers the half-line modes")
    if T is None:
        T = count_bound_states(P, alpha, bc, ctrl).truncation_T
    x, th = _initial_half(P, alpha, bc, ctrl)
    flow = _Flow(lambda t: alpha * P.scalar(t), 0.0, ctrl.ode_rel_tol, P.breakpoints)
    flow.record = [(x, th[0])]
    flow.advance(th[:1], x, T, max_step=(T - x) / 64.0)
    nodes = np.array(flow.record, dtype=float)
    # drop duplicates produced at piece joints
    keep = np.concatenate([[True], np.diff(nodes[:, 0]) > 0])
    return PruferTrace(nodes[keep], bc)
