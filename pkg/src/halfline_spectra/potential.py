"""Nonnegative potentials on the half-line and the line.

Every potential exposes a vectorised profile ``g(t)`` and the log-coordinate
profile ``t2g(s) = e^{2s} G(e^s)``. Integral functionals are evaluated in the
variable ``s = ln t``: power singularities at the origin become exponential
tails there, and dyadic intervals become intervals of fixed length.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy import integrate

from .errors import AccuracyError, ConfigError, DomainError

LN2 = math.log(2.0)
DEFAULT_QUAD_TOL = 1e-10
ZETA_CAP = 4096


class Domain(str, Enum):
    HALF = "half"
    LINE = "line"


class ZetaMode(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    LINE = "line"


def _as_domain(d) -> Domain:
    if isinstance(d, Domain):
        return d
    key = str(d).lower().replace("-", "").replace("_", "")
    aliases = {"half": "half", "halfline": "half", "line": "line", "wholeline": "line", "r": "line"}
    if key not in aliases:
        raise ConfigError(f"unknown domain {d!r}")
    return Domain(aliases[key])


def _as_mode(m) -> ZetaMode:
    if isinstance(m, ZetaMode):
        return m
    key = str(m).lower().replace("-", "").replace("_", "")
    if key in ("wholeline", "line"):
        return ZetaMode.LINE
    try:
        return ZetaMode(key)
    except ValueError:
        raise ConfigError(f"unknown zeta mode {m!r}") from None


# ---------------------------------------------------------------------------
# base class


@dataclass(frozen=True)
class Potential:
    """Base class. Subclasses define ``_g`` on ``t >= 0``.

    On the line a closed-form family is the even extension ``g(|t|)``.
    """

    domain: Domain = field(default=Domain.HALF, kw_only=True)

    def __post_init__(self):
        object.__setattr__(self, "domain", _as_domain(self.domain))

    # -- evaluation ---------------------------------------------------------
    def _g(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def g(self, t) -> np.ndarray:
        """Vectorised G without domain checks (signed t on the line)."""
        t = np.asarray(t, dtype=float)
        if self.domain is Domain.LINE:
            return self._g(np.abs(t))
        return self._g(t)

    def scalar(self, t: float) -> float:
        return float(self.g(np.array([t]))[0])

    @property
    def even(self) -> bool:
        """Line potential with ``G(-t) = G(t)`` by construction."""
        return self.domain is Domain.LINE and type(self).g is Potential.g

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if np.isnan(arr).any():
            raise DomainError("potential evaluated at NaN")
        if self.domain is Domain.HALF and (arr < 0).any():
            raise DomainError(f"t={arr[arr < 0].min()} is outside the half-line")
        out = self.g(arr)
        return float(out) if np.ndim(t) == 0 else out

    def t2g(self, s, side: int = 1) -> np.ndarray:
        """``e^{2s} G(side * e^s)``, computed without overflow where possible."""
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            t = np.exp(s)
            v = np.exp(2.0 * s) * self.g(side * t)
        return np.nan_to_num(v, nan=0.0, posinf=np.inf)

    def t2g_scalar(self, s: float) -> float:
        return float(self.t2g(np.array([s]))[0])

    # -- metadata -----------------------------------------------------------
    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points ``t > 0`` where G is not smooth (mirrored on the line)."""
        return ()

    @property
    def support(self) -> tuple[float, float]:
        """An interval of ``|t|`` outside which G vanishes."""
        return (0.0, math.inf)

    @property
    def length_scale(self) -> float:
        return 1.0

    @property
    def singular_at_zero(self) -> bool:
        return False

    @property
    def monotone(self) -> bool | None:
        """Analytic non-increase on ``t > 0``; None means probe numerically."""
        return None

    def moment_finite(self, k: int) -> bool | None:
        """Convergence of ``∫ t^k G`` at both ends; None if unknown."""
        return None

    def sqrt_mass_finite(self) -> bool | None:
        return None

    def zeta_half_summable(self) -> bool | None:
        """Whether ``Σ ζ_j^{1/2}`` converges (sequence in ℓ_{1/2})."""
        return None

    def tail_sup(self, s: float) -> float:
        """``sup_{σ >= s} t2g(σ)``; default samples ``[s, s + 80]``."""
        grid = s + np.linspace(0.0, 80.0, 8001)
        return float(np.max(self.t2g(grid)))

    def head_sup(self, s: float, side: int = 1) -> float:
        """``sup_{σ <= s} t2g(σ, side)`` bounded by ``e^{2s} sup_{|t|<=e^s} G``."""
        t = np.linspace(0.0, math.exp(s), 4001)
        return float(math.exp(2 * s) * np.max(self.g(side * t)))

    def with_domain(self, domain) -> "Potential":
        import dataclasses

        return dataclasses.replace(self, domain=_as_domain(domain))

    def spec(self) -> dict:
        """JSON-serialisable description accepted by :func:`load_potential`."""
        params = {k: v for k, v in self._params().items()}
        return {"family": type(self).__name__, "params": params, "domain": self.domain.value}

    def _params(self) -> dict:
        import dataclasses

        out = {}
        for f in dataclasses.fields(self):
            if f.name == "domain":
                continue
            v = getattr(self, f.name)
            if isinstance(v, np.ndarray):
                v = v.tolist()
            elif isinstance(v, Potential):
                v = v.spec()
            elif isinstance(v, tuple) and v and isinstance(v[0], Potential):
                v = [p.spec() for p in v]
            out[f.name] = v
        return out


# ---------------------------------------------------------------------------
# closed-form families


@dataclass(frozen=True)
class Zero(Potential):
    def _g(self, t):
        return np.zeros_like(t)

    def t2g(self, s, side=1):
        return np.zeros_like(np.asarray(s, dtype=float))

    def scalar(self, t):
        return 0.0

    def t2g_scalar(self, s):
        return 0.0

    support = property(lambda self: (0.0, 0.0))
    monotone = property(lambda self: True)

    def moment_finite(self, k):
        return True

    def sqrt_mass_finite(self):
        return True

    def zeta_half_summable(self):
        return True

    def tail_sup(self, s):
        return 0.0

    def head_sup(self, s, side=1):
        return 0.0


@dataclass(frozen=True)
class SquareWell(Potential):
    """``depth`` on ``[0, width)``, zero beyond."""

    width: float = 1.0
    depth: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.width <= 0 or self.depth < 0:
            raise ConfigError("SquareWell needs width > 0 and depth >= 0")

    def _g(self, t):
        return np.where(t < self.width, self.depth, 0.0)

    def scalar(self, t):
        return self.depth if abs(t) < self.width else 0.0

    def t2g(self, s, side=1):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            return np.where(s < math.log(self.width), self.depth * np.exp(2 * s), 0.0)

    def t2g_scalar(self, s):
        return self.depth * math.exp(2 * s) if s < math.log(self.width) else 0.0

    breakpoints = property(lambda self: (self.width,))
    support = property(lambda self: (0.0, self.width))
    length_scale = property(lambda self: self.width)
    monotone = property(lambda self: True)

    def moment_finite(self, k):
        return True

    def sqrt_mass_finite(self):
        return True

    def zeta_half_summable(self):
        return True

    def tail_sup(self, s):
        lw = math.log(self.width)
        return self.depth * self.width**2 if s < lw else 0.0

    def head_sup(self, s, side=1):
        return self.depth * math.exp(2 * min(s, math.log(self.width)))


@dataclass(frozen=True)
class ExpDecay(Potential):
    """``e^{-rate t}``."""

    rate: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.rate <= 0:
            raise ConfigError("ExpDecay needs rate > 0")

    def _g(self, t):
        return np.exp(-self.rate * t)

    def scalar(self, t):
        return math.exp(-self.rate * abs(t))

    def t2g(self, s, side=1):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            return np.exp(2 * s - self.rate * np.exp(s))

    def t2g_scalar(self, s):
        if s > 700:
            return 0.0
        return math.exp(2 * s - self.rate * math.exp(s))

    length_scale = property(lambda self: 1.0 / self.rate)
    monotone = property(lambda self: True)

    def moment_finite(self, k):
        return True

    def sqrt_mass_finite(self):
        return True

    def zeta_half_summable(self):
        return True

    def tail_sup(self, s):
        peak = math.log(2.0 / self.rate)
        return self.t2g_scalar(max(s, peak))

    def head_sup(self, s, side=1):
        return math.exp(2 * s)


@dataclass(frozen=True)
class Gaussian(Potential):
    """``e^{-(t/scale)^2}``."""

    scale: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.scale <= 0:
            raise ConfigError("Gaussian needs scale > 0")

    def _g(self, t):
        return np.exp(-((t / self.scale) ** 2))

    def scalar(self, t):
        return math.exp(-((t / self.scale) ** 2))

    def t2g(self, s, side=1):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            return np.exp(2 * s - np.exp(2 * (s - math.log(self.scale))))

    def t2g_scalar(self, s):
        if s > 350:
            return 0.0
        return math.exp(2 * s - math.exp(2 * (s - math.log(self.scale))))

    length_scale = property(lambda self: self.scale)
    monotone = property(lambda self: True)

    def moment_finite(self, k):
        return True

    def sqrt_mass_finite(self):
        return True

    def zeta_half_summable(self):
        return True

    def tail_sup(self, s):
        return self.t2g_scalar(max(s, math.log(self.scale)))

    def head_sup(self, s, side=1):
        return math.exp(2 * s)


@dataclass(frozen=True)
class PowerTail(Potential):
    """``(offset + t)^{-p}``."""

    p: float = 3.0
    offset: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.offset <= 0:
            raise ConfigError("PowerTail needs offset > 0")

    def _g(self, t):
        return (self.offset + t) ** (-self.p)

    def scalar(self, t):
        return (self.offset + abs(t)) ** (-self.p)

    def t2g(self, s, side=1):
        s = np.asarray(s, dtype=float)
        return np.exp(2 * s - self.p * np.logaddexp(math.log(self.offset), s))

    def t2g_scalar(self, s):
        lo = math.log(self.offset)
        m = max(lo, s)
        lse = m + math.log1p(math.exp(-abs(lo - s)))
        return math.exp(2 * s - self.p * lse)

    length_scale = property(lambda self: self.offset)
    monotone = property(lambda self: self.p >= 0)

    def moment_finite(self, k):
        return k < self.p - 1

    def sqrt_mass_finite(self):
        return self.p > 2

    def zeta_half_summable(self):
        return self.p > 2

    def tail_sup(self, s):
        if self.p < 2:
            return math.inf
        if self.p == 2:
            return 1.0
        peak = math.log(2 * self.offset / (self.p - 2))
        return self.t2g_scalar(max(s, peak))

    def head_sup(self, s, side=1):
        return math.exp(2 * s) * self.offset ** (-self.p) if self.p >= 0 else super().head_sup(s)


@dataclass(frozen=True)
class LogBorderline(Potential):
    """``t^{-2} (ln t)^{-1/q}`` for ``t > e``, zero otherwise."""

    q: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.q <= 0:
            raise ConfigError("LogBorderline needs q > 0")

    def _g(self, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = t ** (-2.0) * np.log(t) ** (-1.0 / self.q)
        return np.where(t > math.e, v, 0.0)

    def scalar(self, t):
        t = abs(t)
        return t**-2.0 * math.log(t) ** (-1.0 / self.q) if t > math.e else 0.0

    def t2g(self, s, side=1):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s > 1.0, np.abs(s) ** (-1.0 / self.q), 0.0)

    def t2g_scalar(self, s):
        return s ** (-1.0 / self.q) if s > 1.0 else 0.0

    breakpoints = property(lambda self: (math.e,))
    support = property(lambda self: (math.e, math.inf))
    length_scale = property(lambda self: math.e)
    monotone = property(lambda self: False)

    def moment_finite(self, k):
        # ∫ t^k G dt = ∫ s^{-1/q} e^{(k-1)s} ds over s > 1
        if k == 0:
            return True
        if k == 1:
            return 1.0 / self.q > 1.0
        return False

    def sqrt_mass_finite(self):
        return 1.0 / (2 * self.q) > 1.0

    def zeta_half_summable(self):
        return 1.0 / (2 * self.q) > 1.0

    def tail_sup(self, s):
        return max(s, 1.0) ** (-1.0 / self.q)

    def head_sup(self, s, side=1):
        return 1.0 if s > 1.0 else 0.0


@dataclass(frozen=True)
class HardyTail(Potential):
    """``c t^{-2}`` for ``t >= 1``, zero below."""

    c: float = 0.1

    def _g(self, t):
        with np.errstate(divide="ignore"):
            return np.where(t >= 1.0, self.c / np.maximum(t, 1.0) ** 2, 0.0)

    def scalar(self, t):
        t = abs(t)
        return self.c / (t * t) if t >= 1.0 else 0.0

    def t2g(self, s, side=1):
        s = np.asarray(s, dtype=float)
        return np.where(s >= 0.0, self.c, 0.0)

    def t2g_scalar(self, s):
        return self.c if s >= 0.0 else 0.0

    breakpoints = property(lambda self: (1.0,))
    support = property(lambda self: (1.0, math.inf))
    monotone = property(lambda self: self.c == 0)

    def moment_finite(self, k):
        return k == 0

    def sqrt_mass_finite(self):
        return self.c == 0

    def zeta_half_summable(self):
        return self.c == 0

    def tail_sup(self, s):
        return self.c

    def head_sup(self, s, side=1):
        return self.c if s >= 0 else 0.0


@dataclass(frozen=True)
class PiecewiseConstant(Potential):
    """``values[i]`` on ``[edges[i], edges[i+1])``, zero outside ``[edges[0], edges[-1])``."""

    edges: tuple = (0.0, 1.0)
    values: tuple = (1.0,)

    def __post_init__(self):
        super().__post_init__()
        e = tuple(float(x) for x in self.edges)
        v = tuple(float(x) for x in self.values)
        if len(e) != len(v) + 1 or len(v) == 0:
            raise ConfigError("PiecewiseConstant needs len(edges) == len(values) + 1")
        if e[0] < 0 or any(b <= a for a, b in zip(e[:-1], e[1:])):
            raise ConfigError("PiecewiseConstant edges must be nonnegative and increasing")
        if any(x < 0 or not math.isfinite(x) for x in v):
            raise ConfigError("PiecewiseConstant values must be finite and nonnegative")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "values", v)

    def _g(self, t):
        e = np.asarray(self.edges)
        idx = np.searchsorted(e, t, side="right") - 1
        vals = np.concatenate([self.values, [0.0]])
        idx = np.where((idx < 0) | (idx >= len(self.values)), len(self.values), idx)
        return vals[idx]

    def cumulative(self, t) -> np.ndarray:
        """``∫_0^t G`` in closed form."""
        t = np.asarray(t, dtype=float)
        e = np.asarray(self.edges)
        v = np.asarray(self.values)
        cum = np.concatenate([[0.0], np.cumsum(v * np.diff(e))])
        tc = np.clip(t, e[0], e[-1])
        idx = np.clip(np.searchsorted(e, tc, side="right") - 1, 0, len(v) - 1)
        return cum[idx] + v[idx] * (tc - e[idx])

    breakpoints = property(lambda self: tuple(x for x in self.edges if x > 0))
    support = property(lambda self: (self.edges[0], self.edges[-1]))
    length_scale = property(lambda self: self.edges[-1])

    @property
    def monotone(self):
        v = self.values
        if self.edges[0] > 0 and max(v) > 0:
            return False
        return all(b <= a for a, b in zip(v[:-1], v[1:]))

    def moment_finite(self, k):
        return True

    def sqrt_mass_finite(self):
        return True

    def zeta_half_summable(self):
        return True


@dataclass(frozen=True)
class Sampled(Potential):
    """Tabulated G on a strictly increasing grid, zero outside it."""

    grid: Any = None
    values: Any = None
    interpolation: str = "linear"

    def __post_init__(self):
        super().__post_init__()
        t = np.array(self.grid, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ConfigError("Sampled needs matching 1-D grid and values with >= 2 points")
        if np.any(np.diff(t) <= 0):
            raise ConfigError("Sampled grid must be strictly increasing")
        if t[0] < 0:
            raise ConfigError("Sampled grid must start at t >= 0")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ConfigError("Sampled values must be finite and nonnegative")
        if self.interpolation not in ("linear", "constant"):
            raise ConfigError("interpolation must be 'linear' or 'constant'")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", t)
        object.__setattr__(self, "values", v)

    def __hash__(self):
        return hash((self.grid.tobytes(), self.values.tobytes(), self.interpolation, self.domain))

    def __eq__(self, other):
        return (
            isinstance(other, Sampled)
            and self.domain == other.domain
            and self.interpolation == other.interpolation
            and np.array_equal(self.grid, other.grid)
            and np.array_equal(self.values, other.values)
        )

    def _g(self, t):
        inside = (t >= self.grid[0]) & (t <= self.grid[-1])
        if self.interpolation == "linear":
            out = np.interp(t, self.grid, self.values)
        else:
            idx = np.clip(np.searchsorted(self.grid, t, side="right") - 1, 0, self.grid.size - 1)
            out = self.values[idx]
        return np.where(inside, out, 0.0)

    def scalar(self, t):
        t = abs(t) if self.domain is Domain.LINE else t
        if t < self.grid[0] or t > self.grid[-1]:
            return 0.0
        return float(np.interp(t, self.grid, self.values)) if self.interpolation == "linear" else float(self._g(np.array([t]))[0])

    breakpoints = property(lambda self: tuple(float(x) for x in self.grid if x > 0))
    support = property(lambda self: (float(self.grid[0]), float(self.grid[-1])))
    length_scale = property(lambda self: float(self.grid[-1]))

    @property
    def monotone(self):
        v = self.values
        probe = self.g(np.linspace(0.0, self.grid[-1] * 1.01, 20001))
        return bool(np.all(np.diff(v) <= 0) and np.all(np.diff(probe) <= 1e-15 * max(v.max(), 1e-300)))

    def moment_finite(self, k):
        return True

    def sqrt_mass_finite(self):
        return True

    def zeta_half_summable(self):
        return True

    def _params(self):
        return {
            "grid": self.grid.tolist(),
            "values": self.values.tolist(),
            "interpolation": self.interpolation,
        }


def _all(flags):
    if any(f is False for f in flags):
        return False
    if all(f is True for f in flags):
        return True
    return None


@dataclass(frozen=True)
class Sum(Potential):
    terms: tuple = ()

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ConfigError("Sum needs at least one term")
        for p in self.terms:
            if p.domain is not self.domain:
                raise ConfigError("Sum terms must share the domain of the sum")

    def g(self, t):
        return sum(p.g(t) for p in self.terms)

    @property
    def even(self):
        return self.domain is Domain.LINE and all(p.even for p in self.terms)

    def _g(self, t):
        return self.g(t)

    def scalar(self, t):
        return sum(p.scalar(t) for p in self.terms)

    def t2g(self, s, side=1):
        return sum(p.t2g(s, side) for p in self.terms)

    def t2g_scalar(self, s):
        return sum(p.t2g_scalar(s) for p in self.terms)

    @property
    def breakpoints(self):
        return tuple(sorted({b for p in self.terms for b in p.breakpoints}))

    @property
    def support(self):
        sup = [p.support for p in self.terms]
        return (min(a for a, _ in sup), max(b for _, b in sup))

    @property
    def length_scale(self):
        return max(p.length_scale for p in self.terms)

    singular_at_zero = property(lambda self: any(p.singular_at_zero for p in self.terms))

    def moment_finite(self, k):
        return _all([p.moment_finite(k) for p in self.terms])

    def sqrt_mass_finite(self):
        return _all([p.sqrt_mass_finite() for p in self.terms])

    def zeta_half_summable(self):
        return _all([p.zeta_half_summable() for p in self.terms])

    def tail_sup(self, s):
        return sum(p.tail_sup(s) for p in self.terms)

    def head_sup(self, s, side=1):
        return sum(p.head_sup(s, side) for p in self.terms)


@dataclass(frozen=True)
class Dilated(Potential):
    """``lam^2 G(lam t)``; the ζ-sequence shifts by ``log2(lam)``."""

    base: Potential = None
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "domain", self.base.domain)
        if self.lam <= 0:
            raise ConfigError("Dilated needs lam > 0")

    def g(self, t):
        return self.lam**2 * self.base.g(self.lam * np.asarray(t, dtype=float))

    @property
    def even(self):
        return self.base.even

    def _g(self, t):
        return self.g(t)

    def scalar(self, t):
        return self.lam**2 * self.base.scalar(self.lam * t)

    def t2g(self, s, side=1):
        return self.base.t2g(np.asarray(s, dtype=float) + math.log(self.lam), side)

    def t2g_scalar(self, s):
        return self.base.t2g_scalar(s + math.log(self.lam))

    breakpoints = property(lambda self: tuple(b / self.lam for b in self.base.breakpoints))
    support = property(lambda self: tuple(x / self.lam for x in self.base.support))
    length_scale = property(lambda self: self.base.length_scale / self.lam)
    singular_at_zero = property(lambda self: self.base.singular_at_zero)
    monotone = property(lambda self: self.base.monotone)

    def moment_finite(self, k):
        return self.base.moment_finite(k)

    def sqrt_mass_finite(self):
        return self.base.sqrt_mass_finite()

    def zeta_half_summable(self):
        return self.base.zeta_half_summable()

    def tail_sup(self, s):
        return self.base.tail_sup(s + math.log(self.lam))

    def head_sup(self, s, side=1):
        return self.base.head_sup(s + math.log(self.lam), side)


@dataclass(frozen=True)
class Folded(Potential):
    """Half-line potential ``G(t) + G(-t)`` built from a line potential."""

    base: Potential = None

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain.HALF)

    def _g(self, t):
        return self.base.g(t) + self.base.g(-t)

    def scalar(self, t):
        return self.base.scalar(t) + self.base.scalar(-t)

    def t2g(self, s, side=1):
        return self.base.t2g(s, 1) + self.base.t2g(s, -1)

    breakpoints = property(lambda self: tuple(sorted({abs(b) for b in self.base.breakpoints if b != 0})))
    support = property(lambda self: self.base.support)
    length_scale = property(lambda self: self.base.length_scale)
    singular_at_zero = property(lambda self: self.base.singular_at_zero)

    def moment_finite(self, k):
        return self.base.moment_finite(k)

    def sqrt_mass_finite(self):
        return self.base.sqrt_mass_finite()

    def zeta_half_summable(self):
        return self.base.zeta_half_summable()


@dataclass(frozen=True)
class HalfView(Potential):
    """Half-line potential ``t -> G(side * t)`` cut from a line potential."""

    base: Potential = None
    side: int = 1

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain.HALF)

    def _g(self, t):
        return self.base.g(self.side * t)

    def scalar(self, t):
        return self.base.scalar(self.side * t)

    def t2g(self, s, side=1):
        return self.base.t2g(s, self.side)

    breakpoints = property(lambda self: tuple(sorted({self.side * b for b in line_breakpoints(self.base) if self.side * b > 0})))
    support = property(lambda self: self.base.support)
    length_scale = property(lambda self: self.base.length_scale)
    singular_at_zero = property(lambda self: self.base.singular_at_zero)

    def moment_finite(self, k):
        return self.base.moment_finite(k)

    def sqrt_mass_finite(self):
        return self.base.sqrt_mass_finite()

    def zeta_half_summable(self):
        return self.base.zeta_half_summable()


def line_breakpoints(P: Potential) -> tuple[float, ...]:
    """Signed breakpoints of a line potential."""
    if isinstance(P, LogTransformed):
        return P.breakpoints
    if P.domain is Domain.LINE:
        b = [x for x in P.breakpoints if x > 0]
        return tuple(sorted([-x for x in b] + b))
    return P.breakpoints


def halves(P: Potential) -> tuple[Potential, Potential]:
    """Left and right half-line pieces ``G(-t)`` and ``G(t)`` of a line potential."""
    if P.domain is not Domain.LINE:
        raise DomainError("halves needs a line potential")
    return HalfView(base=P, side=-1), HalfView(base=P, side=1)


@dataclass(frozen=True)
class LogTransformed(Potential):
    """Line potential obtained from a radial profile F through ``r = e^t``.

    ``derivation``: ``e^{2t} F(e^t)``; ``theorem``: ``e^{2|t|} F(e^t)``.
    """

    base: Potential = None
    convention: str = "derivation"

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain.LINE)
        if self.base is None or self.base.domain is not Domain.HALF:
            raise ConfigError("log_transform needs a half-line radial profile")
        if self.convention not in ("derivation", "theorem"):
            raise ConfigError("convention must be 'derivation' or 'theorem'")

    def g(self, t):
        t = np.asarray(t, dtype=float)
        v = self.base.t2g(t)
        if self.convention == "theorem":
            with np.errstate(over="ignore", invalid="ignore"):
                v = np.where(t < 0, v * np.exp(-4.0 * t), v)
            v = np.nan_to_num(v, nan=0.0, posinf=np.inf)
        return v

    def _g(self, t):
        return self.g(t)

    def scalar(self, t):
        v = self.base.t2g_scalar(t)
        if self.convention == "theorem" and t < 0:
            v = v * math.exp(-4.0 * t) if v > 0 else 0.0
        return v

    breakpoints = property(lambda self: tuple(math.log(b) for b in self.base.breakpoints if b > 0))

    @property
    def support(self):
        lo, hi = self.base.support
        if hi <= lo:
            return (0.0, 0.0)
        a = math.log(lo) if lo > 0 else -math.inf
        b = math.log(hi) if math.isfinite(hi) else math.inf
        near = 0.0 if a < 0 < b else min(abs(a), abs(b))
        return (near, max(abs(a), abs(b)))

    length_scale = property(lambda self: 1.0)

    def _left_blows_up(self):
        return self.convention == "theorem" and self.base.scalar(0.0) > 0

    def moment_finite(self, k):
        if self._left_blows_up():
            return False
        return None

    def sqrt_mass_finite(self):
        return False if self._left_blows_up() else None

    def zeta_half_summable(self):
        return False if self._left_blows_up() else None

    def right_sup(self, x: float) -> float:
        """``sup_{t >= x} G``."""
        return self.base.tail_sup(x)

    def left_sup(self, x: float) -> float:
        """``sup_{t <= x} G``."""
        if self.convention == "theorem":
            t = np.linspace(x - 60.0, x, 6001)
            return float(np.max(self.g(t)))
        return self.base.head_sup(x)

    def _params(self):
        return {"base": self.base.spec(), "convention": self.convention}


def log_transform(F: Potential, convention: str = "derivation") -> LogTransformed:
    """Line potential attached to the radial profile ``F``."""
    return LogTransformed(base=F, convention=convention)


# ---------------------------------------------------------------------------
# integration in s = ln t


def _quad(f: Callable[[float], float], a: float, b: float, rtol: float, what: str) -> tuple[float, float]:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsrel=rtol, epsabs=0.0, limit=200)
    return val, err


_GL16 = np.polynomial.legendre.leggauss(16)
_GL8 = np.polynomial.legendre.leggauss(8)


def _composite_gl(f_vec, edges: np.ndarray, rtol: float, what: str) -> float:
    edges = np.asarray(edges, dtype=float)
    total = 0.0
    vals = []
    for nodes, weights in (_GL8, _GL16):
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        x = mid[None, :] + half[None, :] * nodes[:, None]
        vals.append(float(np.sum(f_vec(x) * weights[:, None] * half[None, :])))
    total = vals[1]
    if abs(vals[1] - vals[0]) > max(1e3 * rtol * abs(total), 1e-300):
        raise AccuracyError(f"{what}: composite rule disagreement {abs(vals[1] - vals[0]):.3g}")
    return total


def integrate_s(
    P: Potential,
    weight: Callable,
    a: float,
    b: float,
    side: int = 1,
    rtol: float = DEFAULT_QUAD_TOL,
    what: str = "integral",
) -> float:
    """``∫_a^b t2g(s, side) * weight(s) ds`` over a finite s-interval.

    ``weight`` must accept both floats and arrays.
    """
    if b <= a:
        return 0.0
    lo_t, hi_t = P.support
    if math.isfinite(hi_t):
        if hi_t <= 0:
            return 0.0
        b = min(b, math.log(hi_t))
    if lo_t > 0:
        a = max(a, math.log(lo_t))
    if b <= a:
        return 0.0
    cuts = sorted({math.log(x) for x in P.breakpoints if x > 0 and a < math.log(x) < b})
    edges = np.array([a, *cuts, b])
    if len(edges) > 65:
        return _composite_gl(lambda x: P.t2g(x, side) * weight(x), edges, rtol, what)
    scalar = P.t2g_scalar if side == 1 else (lambda x: float(P.t2g(np.array([x]), side)[0]))
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _quad(lambda x: scalar(x) * weight(x), lo, hi, rtol, what)
        total += v
        err += e
    if not math.isfinite(total):
        return total
    if err > max(1e4 * rtol * abs(total), 1e-280):
        raise AccuracyError(f"{what}: quadrature error {err:.3g} on value {total:.6g}")
    return total


def integrate_s_tail(
    P: Potential,
    weight: Callable,
    start: float,
    direction: int,
    finite: bool | None,
    side: int = 1,
    rtol: float = DEFAULT_QUAD_TOL,
    what: str = "integral",
    max_span: float = 4000.0,
) -> float:
    """``∫ t2g * weight`` from ``start`` to ``±∞`` by growing chunks.

    ``finite`` is the analytic convergence verdict (None if unknown).
    """
    if finite is False:
        return math.inf
    lo_t, hi_t = P.support
    if direction > 0 and math.isfinite(hi_t):
        return integrate_s(P, weight, start, math.log(hi_t) if hi_t > 0 else start, side, rtol, what)
    if direction < 0 and lo_t > 0:
        return integrate_s(P, weight, math.log(lo_t), start, side, rtol, what)
    # reference point past which a quiet run may stop the sweep
    ref = math.log(max(P.length_scale, 1e-300))
    if lo_t > 0:
        ref = max(ref, math.log(lo_t)) if direction > 0 else ref
    total = 0.0
    quiet = 0
    width = 1.0
    pos = start
    travelled = 0.0
    while True:
        nxt = pos + direction * width
        lo, hi = (pos, nxt) if direction > 0 else (nxt, pos)
        piece = integrate_s(P, weight, lo, hi, side, rtol, what)
        if not math.isfinite(piece):
            return math.inf
        total += piece
        beyond = (nxt - ref) * direction > 2.0
        if beyond and abs(piece) <= 1e-3 * rtol * abs(total):
            quiet += 1
        elif beyond and total == 0.0 and piece == 0.0:
            quiet += 1
        else:
            quiet = 0
        if quiet >= 3:
            return total
        pos = nxt
        travelled += width
        width = min(width * 1.5, 64.0)
        if travelled > max_span:
            if finite:
                return total
            raise AccuracyError(f"{what}: no convergence within s-span {max_span}")


def tail_finite(P: Potential, k: int) -> bool | None:
    """Convergence of ``∫_R^∞ t^k G`` for ``R > 0``.

    ``moment_finite`` speaks about both ends, so a False there may come from
    the origin alone; a finite higher moment settles the tail.
    """
    if any(P.moment_finite(j) for j in range(k, 3)):
        return True
    f = P.moment_finite(k)
    return None if (f is False and P.singular_at_zero) else f


def _half_profile(P: Potential) -> Potential:
    return Folded(base=P) if P.domain is Domain.LINE else P


def moment(P: Potential, k: int, interval: tuple[float, float] | None = None, rtol: float = DEFAULT_QUAD_TOL) -> float:
    """``∫ |t|^k G dt`` over ``interval`` (default: the whole domain).

    Returns ``inf`` when the family's convergence predicate fails.
    """
    if k not in (0, 1, 2):
        raise ValueError("moment order must be 0, 1 or 2")
    w = (lambda s: np.exp((k - 1) * s)) if k != 1 else (lambda s: np.ones_like(s) if isinstance(s, np.ndarray) else 1.0)
    if interval is None:
        H = _half_profile(P)
        fin = P.moment_finite(k)
        left = integrate_s_tail(H, w, 0.0, -1, True if fin else fin, rtol=rtol, what=f"moment {k}")
        right = integrate_s_tail(H, w, 0.0, +1, fin, rtol=rtol, what=f"moment {k}")
        return left + right
    a, b = interval
    if P.domain is Domain.HALF and a < 0:
        raise DomainError("interval leaves the half-line")
    if a >= b:
        return 0.0
    if P.domain is Domain.LINE and a < 0:
        pos = moment(P, k, (0.0, b), rtol) if b > 0 else 0.0
        neg = _moment_half(P, k, max(-b, 0.0), -a, -1, rtol)
        return pos + neg
    return _moment_half(P, k, a, b, 1, rtol)


def _moment_half(P, k, a, b, side, rtol):
    w = (lambda s: np.exp((k - 1) * s)) if k != 1 else (lambda s: np.ones_like(s) if isinstance(s, np.ndarray) else 1.0)
    fin = P.moment_finite(k)
    lower = -math.inf if a <= 0 else math.log(a)
    upper = math.inf if not math.isfinite(b) else math.log(b)
    mid = min(max(0.0, lower), upper) if math.isfinite(upper) else max(0.0, lower)
    total = 0.0
    if lower < mid:
        total += (
            integrate_s_tail(P, w, mid, -1, True, side, rtol, f"moment {k}")
            if not math.isfinite(lower)
            else integrate_s(P, w, lower, mid, side, rtol, f"moment {k}")
        )
    if mid < upper:
        total += (
            integrate_s_tail(P, w, mid, +1, fin, side, rtol, f"moment {k}")
            if not math.isfinite(upper)
            else integrate_s(P, w, mid, upper, side, rtol, f"moment {k}")
        )
    return total


def sqrt_mass(P: Potential, rtol: float = DEFAULT_QUAD_TOL) -> float:
    """``∫ √G`` over the domain, ``inf`` when the predicate fails."""
    H = _half_profile(P)
    fin = P.sqrt_mass_finite()
    if fin is False:
        return math.inf
    if P.domain is Domain.LINE:
        # ∫ √G(t) + √G(-t), not √ of the fold
        total = 0.0
        for side in (1, -1):
            total += _sqrt_half(P, side, fin, rtol)
        return total
    return _sqrt_half(P, 1, fin, rtol)


@dataclass(frozen=True)
class _SqrtView(Potential):
    base: Potential = None
    side: int = 1

    def _g(self, t):
        return np.sqrt(self.base.g(self.side * t))

    def t2g(self, s, side=1):
        # e^{2s} √G  =  e^{s} √(t2g)
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.exp(s) * np.sqrt(self.base.t2g(s, self.side))
        return np.nan_to_num(v, nan=0.0)

    def t2g_scalar(self, s):
        v = self.base.t2g_scalar(s) if self.side == 1 else float(self.base.t2g(np.array([s]), -1)[0])
        return math.exp(s) * math.sqrt(v) if v > 0 else 0.0

    breakpoints = property(lambda self: tuple(abs(b) for b in self.base.breakpoints))
    support = property(lambda self: self.base.support)
    length_scale = property(lambda self: self.base.length_scale)


def _sqrt_half(P, side, fin, rtol):
    V = _SqrtView(base=P, side=side, domain=Domain.HALF)
    w = lambda s: np.exp(-s)
    left = integrate_s_tail(V, w, 0.0, -1, True, 1, rtol, "sqrt mass")
    right = integrate_s_tail(V, w, 0.0, +1, fin, 1, rtol, "sqrt mass")
    return left + right


# ---------------------------------------------------------------------------
# ζ-sequences


@dataclass(frozen=True)
class ZetaSequence:
    """Windowed dyadic sequence ``ζ_j``, ``j = j_min..j_max``."""

    mode: ZetaMode
    j_min: int
    j_max: int
    entries: np.ndarray
    quadrature_tol: float = DEFAULT_QUAD_TOL
    closed_lo: bool = True
    closed_hi: bool = True
    base: float = 2.0
    weight: str = "dyadic"

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1)

    def __getitem__(self, j: int) -> float:
        if not self.j_min <= j <= self.j_max:
            raise KeyError(j)
        return float(self.entries[j - self.j_min])

    def __len__(self):
        return len(self.entries)

    @property
    def sup(self) -> float:
        return float(self.entries.max()) if len(self.entries) else 0.0

    def half_sum(self) -> float:
        return float(np.sum(np.sqrt(self.entries)))


def _zeta_entry(H: Potential, j: int, mode: ZetaMode, rtol: float, base: float, weight: str) -> float:
    L = math.log(base)
    if mode is not ZetaMode.DIRICHLET and j == 0:
        # ∫_0^c G for Neumann (c^0 = 1) and ∫_{-1}^1 G via the fold
        w = lambda s: np.exp(-s)
        return integrate_s_tail(H, w, 0.0, -1, True, rtol=rtol, what="zeta_0")
    if weight == "dyadic":
        w = lambda s, jl=j * L: np.exp(jl - s)
    else:
        w = lambda s: np.ones_like(s) if isinstance(s, np.ndarray) else 1.0
    try:
        return integrate_s(H, w, (j - 1) * L, j * L, rtol=rtol, what=f"zeta_{j}")
    except AccuracyError as exc:
        raise AccuracyError(f"zeta entry j={j}: {exc}") from None


def zeta(
    P: Potential,
    mode="dirichlet",
    window: tuple[int, int] | None = None,
    threshold: float = 1e-14,
    base: float = 2.0,
    weight: str = "dyadic",
    cap: int = ZETA_CAP,
    rtol: float = DEFAULT_QUAD_TOL,
) -> ZetaSequence:
    """Dyadic sequence of ``P`` in the requested indexing convention.

    ``weight='dyadic'`` gives ``c^j ∫_{I_j} G``; ``weight='moment'`` gives
    ``∫_{I_j} t G``. Without ``window`` the range is grown from the
    potential's length scale until two consecutive entries drop below
    ``threshold`` times the running maximum on each side, or ``cap`` entries
    are taken on a side (that side is then flagged as not closed).
    """
    mode = _as_mode(mode)
    if mode is ZetaMode.LINE and P.domain is not Domain.LINE:
        raise DomainError("whole-line zeta needs a line potential")
    if mode is not ZetaMode.LINE and P.domain is not Domain.HALF:
        raise DomainError(f"{mode.value} zeta needs a half-line potential")
    if base <= 1:
        raise ConfigError("dyadic base must exceed 1")
    if weight not in ("dyadic", "moment"):
        raise ConfigError("weight must be 'dyadic' or 'moment'")
    H = _half_profile(P)
    one_sided = mode is not ZetaMode.DIRICHLET
    entry = lambda j: _zeta_entry(H, j, mode, rtol, base, weight)

    if window is not None:
        j_min, j_max = int(window[0]), int(window[1])
        if one_sided and j_min != 0:
            raise ConfigError(f"{mode.value} sequences start at j = 0")
        if j_max < j_min:
            raise ConfigError("empty zeta window")
        vals = np.array([entry(j) for j in range(j_min, j_max + 1)])
        return ZetaSequence(mode, j_min, j_max, vals, rtol, base=base, weight=weight)

    L = math.log(base)
    j0 = int(round(math.log(max(P.length_scale, 1e-300)) / L))
    if one_sided:
        j0 = max(j0, 0)
    found: dict[int, float] = {j0: entry(j0)}
    running = found[j0]

    def sweep(step):
        nonlocal running
        j = j0
        small = 0
        taken = 0
        while True:
            j += step
            if one_sided and j < 0:
                return True
            taken += 1
            if taken > cap:
                return False
            v = entry(j)
            found[j] = v
            if not math.isfinite(v):
                return False
            running = max(running, v)
            small = small + 1 if v <= threshold * running else 0
            if small >= 2:
                return True

    closed_hi = sweep(+1)
    closed_lo = sweep(-1)
    # trim the below-threshold run on each closed side
    js = sorted(found)
    lo, hi = js[0], js[-1]
    floor = threshold * running
    if closed_hi:
        while hi > lo and found[hi] <= floor:
            hi -= 1
    if closed_lo and not one_sided:
        while lo < hi and found[lo] <= floor:
            lo += 1
    vals = np.array([found[j] for j in range(lo, hi + 1)])
    return ZetaSequence(mode, lo, hi, vals, rtol, closed_lo, closed_hi, base, weight)


def zeta_half_sum(P: Potential, mode="dirichlet") -> float:
    """``Σ ζ_j^{1/2}``; ``inf`` by predicate or when the window never closes."""
    if P.zeta_half_summable() is False:
        return math.inf
    seq = zeta(P, mode)
    if not (seq.closed_hi and seq.closed_lo):
        return math.inf
    return seq.half_sum()


# ---------------------------------------------------------------------------
# spec files

FAMILIES: dict[str, type] = {
    cls.__name__: cls
    for cls in (Zero, SquareWell, ExpDecay, Gaussian, PowerTail, LogBorderline, HardyTail, PiecewiseConstant, Sampled)
}


def _from_dict(d: Mapping[str, Any], base_dir: Path | None = None) -> Potential:
    if "family" not in d:
        raise ConfigError("potential spec needs a 'family' field")
    fam = d["family"]
    params = dict(d.get("params", {}) or {})
    domain = d.get("domain", "half")
    try:
        if fam == "Sum":
            terms = tuple(_from_dict(t, base_dir) for t in params.get("terms", []))
            return Sum(terms=terms, domain=domain)
        if fam == "Dilated":
            return Dilated(base=_from_dict(params["base"], base_dir), lam=float(params["lam"]))
        if fam == "LogTransformed":
            return LogTransformed(base=_from_dict(params["base"], base_dir), convention=params.get("convention", "derivation"))
        if fam not in FAMILIES:
            raise ConfigError(f"unknown potential family {fam!r}")
        if fam == "Sampled" and "file" in params:
            path = Path(params.pop("file"))
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            try:
                data = np.loadtxt(path, ndmin=2)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot read sampled potential {path}: {exc}") from None
            if data.shape[1] != 2:
                raise ConfigError("sampled potential file needs two columns (t, G)")
            params["grid"], params["values"] = data[:, 0], data[:, 1]
        return FAMILIES[fam](domain=domain, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {fam}: {exc}") from None
    except KeyError as exc:
        raise ConfigError(f"missing parameter {exc} for {fam}") from None


def _parse_inline(text: str) -> dict:
    # Family:key=val,key=val@domain
    domain = "half"
    if "@" in text:
        text, domain = text.rsplit("@", 1)
    fam, _, rest = text.partition(":")
    params: dict[str, Any] = {}
    for item in filter(None, (x.strip() for x in rest.split(","))):
        if "=" not in item:
            raise ConfigError(f"inline parameter {item!r} is not key=value")
        k, v = item.split("=", 1)
        try:
            params[k.strip()] = float(v)
        except ValueError:
            params[k.strip()] = v.strip()
    return {"family": fam.strip(), "params": params, "domain": domain}


def load_potential(spec: str | Path | Mapping[str, Any]) -> Potential:
    """Build a potential from a dict, a JSON file, a JSON string or inline text.

    Inline text looks like ``ExpDecay:rate=2`` or ``Gaussian:scale=1@line``.
    """
    if isinstance(spec, Mapping):
        return _from_dict(spec)
    text = str(spec)
    path = Path(text)
    if path.suffix.lower() == ".json" or (len(text) < 4096 and path.is_file()):
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot parse potential file {path}: {exc}") from None
        if not isinstance(data, Mapping):
            raise ConfigError("potential file must hold a JSON object")
        return _from_dict(data, path.parent)
    if text.lstrip().startswith("{"):
        try:
            return _from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse inline JSON potential: {exc}") from None
    return _from_dict(_parse_inline(text))


def probe_nonnegative(P: Potential, t_max: float | None = None, n: int = 20001) -> bool:
    """Dense-grid check of ``G >= 0``."""
    top = t_max or 4 * max(P.length_scale, P.support[1] if math.isfinite(P.support[1]) else 0.0, 1.0)
    t = np.linspace(0.0 if P.domain is Domain.HALF else -top, top, n)
    return bool(np.all(P.g(t) >= 0))


def is_monotone(P: Potential) -> bool:
    """Non-increase of G on ``t > 0``, analytic when the family knows it."""
    m = P.monotone
    if m is not None:
        return bool(m)
    top = 8 * max(P.length_scale, 1.0)
    t = np.geomspace(1e-8, top, 40001)
    v = P.g(t)
    return bool(np.all(np.diff(v) <= 1e-14 * max(v.max(), 1e-300)))
