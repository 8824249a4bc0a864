"""Galerkin pencils for the quotient ``∫ G|u|² / ∫ |u'|²`` and its relatives.

Trial spaces are continuous piecewise-linear. On the half-line the default
coordinates are ``x = ln t`` with ``u = t^{1/2} w``, where

    ∫ |u'|² dt = ∫ (w'² + w²/4) dx + w(x_0)²/2 + w(x_N)²/2,
    ∫ G |u|² dt = ∫ t²G(t) w² dx,

once ``w`` is continued by ``w(x_0) e^{(x - x_0)/2}`` on the left (``u``
linear near 0) and ``w(x_N) e^{-(x - x_N)/2}`` on the right (``u`` constant
past the last node). Those continuations keep the trial space inside the
energy space, so every discrete eigenvalue is a lower bound for the
corresponding exact one.

Counting above a level ``s`` uses the inertia of the tridiagonal matrix
``s K - M`` (LDLᵀ pivots), never a full spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg, optimize, sparse
from scipy.sparse.linalg import eigsh

from ._quad import element_integrals
from .errors import AccuracyError, DomainError
from .oscillate import Control, count_bound_states
from .potential import (
    DEFAULT_QUAD_TOL,
    Domain,
    Potential,
    integrate_s,
    integrate_s_tail,
    moment,
    tail_finite,
    zeta,
)

LN2 = math.log(2.0)


@dataclass
class DiscretePencil:
    """Tridiagonal pair (weighted mass ``M``, stiffness ``K``)."""

    mesh: np.ndarray
    coords: str
    denominator_mode: str
    K_diag: np.ndarray
    K_off: np.ndarray
    M_diag: np.ndarray
    M_off: np.ndarray

    @property
    def size(self) -> int:
        return self.K_diag.size

    @property
    def stiffness(self) -> sparse.csr_matrix:
        return sparse.diags([self.K_off, self.K_diag, self.K_off], [-1, 0, 1], format="csr")

    @property
    def weighted_mass(self) -> sparse.csr_matrix:
        return sparse.diags([self.M_off, self.M_diag, self.M_off], [-1, 0, 1], format="csr")

    def count_above(self, s: float) -> int:
        """Number of pencil eigenvalues strictly above ``s``."""
        a = (s * self.K_diag - self.M_diag).tolist()
        b = (s * self.K_off - self.M_off).tolist()
        tiny = 1e-300
        neg = 0
        d = a[0]
        if d == 0.0:
            d = tiny
        if d < 0:
            neg += 1
        for i in range(1, len(a)):
            bi = b[i - 1]
            d = a[i] - bi * bi / d
            if d == 0.0:
                d = -tiny if bi != 0.0 else tiny
            if d < 0:
                neg += 1
        return neg

    def eigenvalues(self, k: int | None = None) -> np.ndarray:
        """Largest ``k`` eigenvalues, descending (all when ``k`` is None)."""
        n = self.size
        k = n if k is None else min(k, n)
        if k <= 0:
            return np.zeros(0)
        if not np.any(self.M_diag):
            return np.zeros(k)
        if n <= 500 or k > n // 4:
            Kb = np.vstack([np.concatenate([[0.0], self.K_off]), self.K_diag])
            U = linalg.cholesky_banded(Kb, lower=False)
            Ud = np.zeros((n, n))
            Ud[np.arange(n), np.arange(n)] = U[1]
            Ud[np.arange(n - 1), np.arange(1, n)] = U[0, 1:]
            M = self.weighted_mass.toarray()
            X = linalg.solve_triangular(Ud, M, trans="T", lower=False)
            C = linalg.solve_triangular(Ud, X.T, trans="T", lower=False).T
            C = 0.5 * (C + C.T)
            w = linalg.eigvalsh(C, subset_by_index=(n - k, n - 1))
            return np.sort(np.maximum(w, 0.0))[::-1]
        w = eigsh(self.weighted_mass.tocsc(), k=k, M=self.stiffness.tocsc(), which="LA", return_eigenvectors=False)
        return np.sort(np.maximum(w, 0.0))[::-1]

    def top(self, rtol: float = 1e-10) -> float:
        """Largest eigenvalue by bisection on the inertia count."""
        if not np.any(self.M_diag):
            return 0.0
        # Gershgorin-type bound: λ ≤ max row ratio is not guaranteed; grow instead
        hi = 1.0
        while self.count_above(hi) > 0:
            hi *= 4.0
        lo = hi / 4.0
        while self.count_above(lo) == 0 and lo > 1e-300:
            hi = lo
            lo /= 4.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.count_above(mid) > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= rtol * hi:
                break
        return lo

    def trace(self) -> float:
        """``Tr(K^{-1} M)`` from the tridiagonal band of ``K^{-1}``."""
        n = self.size
        a = self.K_diag
        b = self.K_off
        d = np.empty(n)
        l = np.empty(max(n - 1, 0))
        d[0] = a[0]
        for i in range(1, n):
            l[i - 1] = b[i - 1] / d[i - 1]
            d[i] = a[i] - l[i - 1] * b[i - 1]
        zd = np.empty(n)
        zo = np.empty(max(n - 1, 0))
        zd[-1] = 1.0 / d[-1]
        for i in range(n - 2, -1, -1):
            zo[i] = -l[i] * zd[i + 1]
            zd[i] = 1.0 / d[i] + l[i] * l[i] * zd[i + 1]
        return float(np.dot(zd, self.M_diag) + 2.0 * np.dot(zo, self.M_off))


# ---------------------------------------------------------------------------
# assembly


def _right_mass_finite(P: Potential) -> bool | None:
    return tail_finite(P, 0)


def _p1_stiffness(nodes: np.ndarray):
    h = np.diff(nodes)
    diag = np.zeros(nodes.size)
    diag[:-1] += 1.0 / h
    diag[1:] += 1.0 / h
    return diag, -1.0 / h


def _p1_mass(nodes: np.ndarray):
    h = np.diff(nodes)
    diag = np.zeros(nodes.size)
    diag[:-1] += h / 3.0
    diag[1:] += h / 3.0
    return diag, h / 6.0


def _weighted(fun, nodes: np.ndarray, rtol: float):
    ll, lr, rr = element_integrals(fun, nodes[:-1], nodes[1:], rtol=rtol)
    diag = np.zeros(nodes.size)
    diag[:-1] += ll
    diag[1:] += rr
    return diag, lr


def assemble_bs(P: Potential, mesh, mode: str = "log", rtol: float = 1e-10) -> DiscretePencil:
    """Pencil for the half-line quotient with ``u(0) = 0``.

    ``mode='linear'``: ``mesh`` holds nodes ``0 < t_1 < ... < t_n`` (the node
    at 0 is implied); the last hat is continued by the constant 1, which
    adds ``∫_{t_n}^∞ G`` to the last mass entry.
    ``mode='log'``: ``mesh`` holds nodes in ``x = ln t`` (see module notes).
    """
    if P.domain is not Domain.HALF:
        raise DomainError("assemble_bs works on half-line potentials")
    nodes = np.asarray(mesh, dtype=float)
    if nodes.ndim != 1 or nodes.size < 2 or np.any(np.diff(nodes) <= 0):
        raise ValueError("mesh must be a strictly increasing array of >= 2 nodes")
    if mode == "linear":
        if nodes[0] <= 0:
            raise ValueError("linear mesh must start above 0 (Dirichlet node implied)")
        full = np.concatenate([[0.0], nodes])
        Kd, Ko = _p1_stiffness(full)
        Md, Mo = _weighted(lambda t: P.g(t), full, rtol)
        Kd, Ko, Md, Mo = Kd[1:], Ko[1:], Md[1:], Mo[1:]
        tail = integrate_s_tail(P, lambda s: np.exp(-s), math.log(nodes[-1]), +1, _right_mass_finite(P), what="mass tail")
        Md[-1] += tail
        return DiscretePencil(nodes, "linear", "dirichlet_homogeneous", Kd, Ko, Md, Mo)
    if mode != "log":
        raise ValueError("mode must be 'linear' or 'log'")
    Kd, Ko = _p1_stiffness(nodes)
    m4d, m4o = _p1_mass(nodes)
    Kd = Kd + 0.25 * m4d
    Ko = Ko + 0.25 * m4o
    Kd[0] += 0.5
    Kd[-1] += 0.5
    Md, Mo = _weighted(lambda x: P.t2g(x), nodes, rtol)
    x0, xn = nodes[0], nodes[-1]
    Md[0] += integrate_s_tail(P, lambda s, x0=x0: np.exp(s - x0), x0, -1, True, what="left tail")
    Md[-1] += integrate_s_tail(P, lambda s, xn=xn: np.exp(xn - s), xn, +1, _right_mass_finite(P), what="right tail")
    if not (np.all(np.isfinite(Md)) and np.all(np.isfinite(Mo))):
        raise AccuracyError("weighted mass has non-finite entries; t²G is not integrable on the mesh")
    return DiscretePencil(nodes, "log", "dirichlet_homogeneous", Kd, Ko, Md, Mo)


def assemble_interval(P: Potential, nodes, dirichlet: bool = False, scale_j: int | None = None, rtol: float = 1e-10) -> DiscretePencil:
    """Pencil on a finite interval.

    ``dirichlet=False``: denominator ``∫ |u'|² + |u|²`` with natural ends.
    ``dirichlet=True``: denominator ``∫ |u'|²`` with ``u = 0`` at both ends.
    With ``scale_j`` the nodes live in ``(1/2, 1)`` and the weight is
    ``4^j G(2^j τ)``, the image of the interval ``(2^{j-1}, 2^j)``.
    """
    nodes = np.asarray(nodes, dtype=float)
    if scale_j is None:
        fun = lambda t: P.g(t)
    else:
        shift = scale_j * LN2
        fun = lambda tau: P.t2g(np.log(tau) + shift) / tau**2
    Kd, Ko = _p1_stiffness(nodes)
    Md, Mo = _weighted(fun, nodes, rtol)
    if dirichlet:
        Kd, Ko, Md, Mo = Kd[1:-1], Ko[1:-1], Md[1:-1], Mo[1:-1]
        mode = "dirichlet_interval"
    else:
        m1d, m1o = _p1_mass(nodes)
        Kd, Ko = Kd + m1d, Ko + m1o
        mode = "finite_interval_h1"
    return DiscretePencil(nodes, "linear", mode, Kd, Ko, Md, Mo)


# ---------------------------------------------------------------------------
# meshes


def _hille_profile(P: Potential, x: np.ndarray) -> np.ndarray:
    """``β(x) = t ∫_t^∞ G`` at ``t = e^x``, i.e. ``∫_0^∞ t2g(x + v) e^{-v} dv``."""
    out = np.empty(x.size)
    fin = _right_mass_finite(P)
    for i, xi in enumerate(x):
        out[i] = integrate_s_tail(P, lambda s, xi=xi: np.exp(xi - s), float(xi), +1, fin, what="hille")
    return out


def _first_x(pred, lo, hi, iters=80):
    """Smallest x in ``[lo, hi]`` with ``pred`` true, assuming monotone pred."""
    if pred(lo):
        return lo
    if not pred(hi):
        return hi
    for _ in range(iters):
        m = 0.5 * (lo + hi)
        if pred(m):
            hi = m
        else:
            lo = m
        if hi - lo < 1e-6:
            break
    return hi


def bs_mesh(P: Potential, s: float, per_wave: float = 8.0, per_unit: float = 2.0, budget: int = 2_000_000) -> np.ndarray:
    """Level-0 log-coordinate mesh for counting above level ``s``.

    The range covers every x where ``t²G/s`` is not negligible, plus a decay
    zone past the last turning point; element sizes resolve the local
    wavenumber ``√(t²G/s)``.
    """
    ls = math.log(P.length_scale)
    lo_t, hi_t = P.support
    # left cut: t²G/s below 1e-10 everywhere to the left
    x_lo = _first_x(lambda x: not (P.head_sup(x) / s < 1e-10), ls - 200.0, ls + 50.0)
    x_lo = min(x_lo, ls) - 1.0
    if lo_t > 0:
        x_lo = max(x_lo, math.log(lo_t) - 1.0)
    # right cut: past the last turning point t²G/s = 1/4, plus a decay zone
    peak_hi = ls + 4000.0
    x_turn = _first_x(lambda x: P.tail_sup(x) / s < 0.25, ls, peak_hi)
    x_hi = x_turn + 40.0
    if math.isfinite(hi_t):
        x_hi = min(x_hi, math.log(hi_t)) if hi_t > 0 else x_lo + 1.0
    x_hi = max(x_hi, x_lo + 1.0)
    breaks = sorted(math.log(b) for b in P.breakpoints if b > 0 and x_lo < math.log(b) < x_hi)
    edges = [x_lo, *breaks, x_hi]
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        # sample the wavenumber on a fine probe grid to size elements
        probe = np.linspace(a, b, max(int((b - a) * 64) + 2, 8))
        k = np.sqrt(np.maximum(P.t2g(probe), 0.0) / s)
        # density in nodes per unit x
        dens = np.maximum(per_unit, per_wave * k / (2 * math.pi))
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(probe))])
        n = max(int(math.ceil(cum[-1])), 1)
        if n > budget:
            raise AccuracyError(f"mesh for s={s:.3g} needs {n} nodes, over the budget {budget}")
        targets = np.linspace(0.0, cum[-1], n + 1)
        pieces.append(np.interp(targets, cum, probe)[:-1])
    nodes = np.concatenate(pieces + [np.array([x_hi])])
    return np.unique(nodes)


def refine(nodes: np.ndarray, levels: int = 1) -> np.ndarray:
    """Bisect every element ``levels`` times (nested meshes)."""
    for _ in range(levels):
        mid = 0.5 * (nodes[1:] + nodes[:-1])
        out = np.empty(nodes.size + mid.size)
        out[0::2] = nodes
        out[1::2] = mid
        nodes = out
    return nodes


# ---------------------------------------------------------------------------
# operations


def bs_eigenvalues(P: Potential, mesh, k: int, mode: str = "log") -> np.ndarray:
    """Top-``k`` discrete eigenvalues on ``mesh`` (lower bounds, descending)."""
    pencil = assemble_bs(P, mesh, mode)
    if k > pencil.size:
        raise ValueError("k exceeds the trial-space dimension")
    return pencil.eigenvalues(k)


@dataclass(frozen=True)
class BSCount:
    count: int
    converged: bool
    level: int
    nodes: int
    history: tuple[int, ...] = ()

    def __int__(self):
        return self.count


def n_plus_bs(P: Potential, s: float, ctrl: Control | None = None, max_level: int = 4, budget: int = 2_000_000) -> BSCount:
    """Discrete ``n_+(s, T_G)`` under nested refinement.

    Stops when two successive levels agree; the value is nondecreasing in
    the level, and when the node budget stops the refinement the last
    (lower-bound) value is returned unconverged.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if isinstance(P, Potential) and not _has_mass(P):
        return BSCount(0, True, 0, 0, (0,))
    try:
        base = bs_mesh(P, s, budget=budget)
    except AccuracyError:
        return BSCount(0, False, -1, 0, ())
    history: list[int] = []
    nodes = base
    for level in range(max_level + 1):
        if nodes.size > budget:
            break
        c = assemble_bs(P, nodes, "log").count_above(s)
        history.append(c)
        if len(history) >= 2 and history[-1] == history[-2]:
            return BSCount(c, True, level, nodes.size, tuple(history))
        nodes = refine(nodes)
    return BSCount(history[-1] if history else 0, False, len(history) - 1, nodes.size, tuple(history))


def _has_mass(P: Potential) -> bool:
    lo, hi = P.support
    if hi <= lo:
        return False
    return moment(P, 0) > 0 if P.moment_finite(0) is not False else True


def top_eigenvalue(P: Potential, rtol: float = 1e-6, max_level: int = 6) -> tuple[float, bool]:
    """Largest eigenvalue of ``T_G`` by refinement until it stabilises."""
    if not _has_mass(P):
        return 0.0, True
    # scale guess: the Hille quantity
    beta = hille_bracket(P, quick=True)["beta0"]
    nodes = bs_mesh(P, max(beta, 1e-300) / 4.0, per_wave=16.0, per_unit=8.0)
    prev = None
    for level in range(max_level + 1):
        lam = assemble_bs(P, nodes, "log").top(rtol=1e-12)
        if prev is not None and abs(lam - prev) <= rtol * lam:
            return lam, True
        prev = lam
        nodes = refine(nodes)
    return prev, False


def hille_bracket(P: Potential, quick: bool = False) -> dict:
    """β₀ = sup_t t∫_t^∞ G with the norm and ζ brackets and a compactness flag.

    β is sampled on a grid in ``x = ln t``; on each grid cell
    ``t ∫_t^∞ G <= t_{i+1} ∫_{t_i}^∞ G``, which gives a certified upper
    envelope. The sampled maximum is refined by a bounded scalar search.
    """
    ls = math.log(P.length_scale)
    lo_t, hi_t = P.support
    x_lo = ls - 30.0
    x_hi = math.log(hi_t) if math.isfinite(hi_t) and hi_t > 0 else ls + 60.0
    if lo_t > 0:
        x_lo = min(x_lo, math.log(lo_t) - 1.0)
    n = 400 if quick else 3000
    x = np.linspace(x_lo, x_hi, n)
    beta = _hille_profile(P, x)
    dx = x[1] - x[0]
    envelope = float(np.max(beta * math.exp(dx)))
    i = int(np.argmax(beta))
    b0 = float(beta[i])
    if not quick and b0 > 0:
        a, b = x[max(i - 1, 0)], x[min(i + 1, n - 1)]
        f = lambda z: -float(_hille_profile(P, np.array([z]))[0])
        r = optimize.minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
        b0 = max(b0, -float(r.fun))
    out = {"beta0": b0, "beta0_upper": max(envelope, b0)}
    if quick:
        return out
    # ends: t∫_t^∞G should vanish as t → 0 and t → ∞
    far_right = float(_hille_profile(P, np.array([max(x_hi, ls) + 1e6]))[0]) if not math.isfinite(hi_t) else 0.0
    far_left = float(_hille_profile(P, np.array([ls - 200.0]))[0])
    compact = b0 == 0 or (far_right <= 1e-2 * b0 and far_left <= 1e-2 * b0 and beta[-1] <= beta.max())
    zs = zeta(P, "dirichlet").sup
    out.update(
        norm_bracket=(b0, 4.0 * max(envelope, b0)),
        zeta_bracket=(0.5 * zs, 8.0 * zs),
        zeta_sup=zs,
        compact=bool(compact),
        far_values=(far_left, far_right),
    )
    return out


def finite_interval_eigs(P: Potential, interval: tuple[float, float], k: int, tol: float = 1e-8, max_level: int = 13) -> np.ndarray:
    """Top-``k`` eigenvalues of ``∫ G|u|² / ∫(|u'|² + |u|²)`` on ``interval``.

    Uniform nested meshes are refined until the ``k``-th value settles.
    """
    a, b = interval
    if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
        raise ValueError("interval must be finite and nonempty")
    breaks = sorted(x for x in P.breakpoints if a < x < b)
    edges = np.array([a, *breaks, b])
    n0 = max(64, 4 * k)
    nodes = np.unique(np.concatenate([np.linspace(lo, hi, max(int(n0 * (hi - lo) / (b - a)), 2)) for lo, hi in zip(edges[:-1], edges[1:])]))
    prev = None
    for _ in range(max_level):
        if nodes.size - 1 < k:
            nodes = refine(nodes)
            continue
        lam = assemble_interval(P, nodes).eigenvalues(k)
        if prev is not None and np.all(np.abs(lam - prev) <= tol * max(lam[0], 1e-300)):
            return lam
        prev = lam
        if nodes.size > 40000:
            break
        nodes = refine(nodes)
    return prev


def _interval_count(P: Potential, j: int, s: float) -> int:
    tau = np.linspace(0.5, 1.0, 33)
    k = np.sqrt(np.maximum(P.t2g(np.log(tau) + j * LN2) / tau**2, 0.0) / s)
    n = int(max(32, 16 * k.max() * 0.5 / math.pi * 2))
    breaks = [b / 2.0**j for b in P.breakpoints if 2.0 ** (j - 1) < b < 2.0**j]
    nodes = np.unique(np.concatenate([np.linspace(0.5, 1.0, n + 1), breaks]))
    prev = None
    for _ in range(6):
        c = assemble_interval(P, nodes, dirichlet=True, scale_j=j).count_above(s)
        if c == prev:
            return c
        prev = c
        nodes = refine(nodes)
    return prev


def ns_diagnostic(P: Potential, s_grid: Sequence[float], j_window: tuple[int, int]) -> float:
    """``max_s Σ_j s^{1/2} n_+(s)`` for Dirichlet problems on the dyadic intervals.

    A finite-window estimate: the sum runs over ``j_window`` and the max
    over ``s_grid`` only.
    """
    best = 0.0
    j0, j1 = j_window
    z = zeta(P, "dirichlet", (j0, j1))
    for s in s_grid:
        total = 0
        for j in range(j0, j1 + 1):
            # an interval whose ζ_j is below s/8 cannot hold an eigenvalue above s
            if z[j] * 8.0 <= s:
                continue
            total += _interval_count(P, j, s)
        best = max(best, math.sqrt(s) * total)
    return best


@dataclass(frozen=True)
class BSPrincipleReport:
    alpha: float
    oscillation_count: int
    bs_count: int
    bs_converged: bool
    equal: bool


def bs_principle_check(P: Potential, alpha: float, ctrl: Control | None = None) -> BSPrincipleReport:
    """Compare the oscillation count at ``α`` with the pencil count above ``1/α``."""
    osc = count_bound_states(P, alpha, "dirichlet", ctrl)
    if not osc.exact:
        raise AccuracyError(f"oscillation count not certified at alpha={alpha}")
    bs = n_plus_bs(P, 1.0 / alpha, ctrl)
    return BSPrincipleReport(alpha, osc.lower, bs.count, bs.converged, osc.lower == bs.count)


@dataclass(frozen=True)
class TraceReport:
    discrete_trace: float
    moment1: float
    rel_gap: float
    applicable: bool
    history: tuple[float, ...] = ()


def trace_check(P: Potential, rtol: float = 1e-3, max_level: int = 7) -> TraceReport:
    """Discrete ``Tr T_G`` under refinement against ``∫ tG``.

    The Green kernel has a kink on the diagonal, so the discrete trace
    approaches its limit at first order in the element size; successive
    differences then track the remaining error.
    """
    m1 = moment(P, 1)
    if not math.isfinite(m1):
        return TraceReport(math.nan, m1, math.nan, False)
    if m1 == 0:
        return TraceReport(0.0, 0.0, 0.0, True)
    ls = math.log(P.length_scale)
    lo_t, hi_t = P.support
    x_lo = _first_x(lambda x: integrate_s_tail(P, lambda s: 1.0, x, -1, True, what="head") < 1e-7 * m1, ls - 200, ls)
    if lo_t > 0:
        x_lo = max(x_lo, math.log(lo_t))
    if math.isfinite(hi_t):
        x_hi = math.log(hi_t)
    else:
        fin = P.moment_finite(1)
        x_hi = _first_x(
            lambda x: integrate_s_tail(P, lambda s: 1.0, x, +1, fin, what="tail") < 1e-5 * m1, ls, ls + 4000
        )
    breaks = sorted(math.log(b) for b in P.breakpoints if b > 0 and x_lo < math.log(b) < x_hi)
    edges = [x_lo, *breaks, x_hi]
    nodes = np.unique(np.concatenate([np.linspace(a, b, max(int((b - a) * 8) + 2, 3)) for a, b in zip(edges[:-1], edges[1:])]))
    hist = []
    for _ in range(max_level):
        tr = assemble_bs(P, nodes, "log").trace()
        hist.append(tr)
        if len(hist) >= 2 and abs(hist[-1] - hist[-2]) <= rtol * m1:
            break
        nodes = refine(nodes)
    tr = hist[-1]
    return TraceReport(tr, m1, abs(tr - m1) / m1, True, tuple(hist))
