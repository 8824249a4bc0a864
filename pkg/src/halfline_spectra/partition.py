"""Partitions of an interval that balance ``(length)^a × (mass of G)`` across pieces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import AccuracyError
from .potential import Potential, moment


@dataclass(frozen=True)
class Partition:
    interval: tuple[float, float]
    breakpoints: tuple[float, ...]
    a: float

    def __post_init__(self):
        lo, hi = self.interval
        b = self.breakpoints
        if any(not lo < x < hi for x in b) or any(y <= x for x, y in zip(b, b[1:])):
            raise ValueError("breakpoints must be strictly increasing and interior")

    @property
    def edges(self) -> tuple[float, ...]:
        return (self.interval[0], *self.breakpoints, self.interval[1])

    @property
    def n(self) -> int:
        return len(self.breakpoints) + 1


def _mass_fn(P: Potential) -> Callable[[float, float], float]:
    cum = getattr(P, "cumulative", None)
    if cum is not None:
        return lambda x, y: float(cum(y) - cum(x))
    return lambda x, y: moment(P, 0, (x, y)) if y > x else 0.0


def phi(P: Potential, partition: Partition, a: float | None = None) -> float:
    """``max_k (t_k - t_{k-1})^a ∫_{I_k} G``."""
    a = partition.a if a is None else a
    mass = _mass_fn(P)
    e = partition.edges
    return max((y - x) ** a * mass(x, y) for x, y in zip(e[:-1], e[1:]))


def build_partition(P: Potential, interval: tuple[float, float], n: int, a: float, xtol: float = 1e-12) -> Partition:
    """Partition into ``n`` pieces with ``Φ <= l^a n^{-1-a} ∫ G``.

    Pieces are peeled off from the right: each new left end ``x`` solves
    ``(b - x)^a ∫_x^b G = l^a n^{-1-a} ∫ G`` on the current remainder
    ``(lo, b)``. A remainder already below the target is split evenly into
    the pieces still owed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if a <= 0:
        raise ValueError("a must be positive")
    lo, hi = map(float, interval)
    if not hi > lo:
        raise ValueError("interval must be nonempty")
    mass = _mass_fn(P)
    total = mass(lo, hi)
    if not math.isfinite(total):
        raise ValueError("∫ G over the interval must be finite")
    l = hi - lo
    if total == 0 or n == 1:
        return Partition((lo, hi), tuple(np.linspace(lo, hi, n + 1)[1:-1].tolist()), a)
    target = l**a * n ** (-1.0 - a) * total
    # residuals are compared in units of the target
    cuts: list[float] = []
    b = hi
    for owed in range(n, 1, -1):
        if (b - lo) ** a * mass(lo, b) <= target:
            cuts.extend(np.linspace(lo, b, owed + 1)[1:-1].tolist())
            break
        f = lambda x, b=b: ((b - x) ** a * mass(x, b) - target) / target
        try:
            x = optimize.brentq(f, lo, b, xtol=xtol * l, rtol=4 * np.finfo(float).eps, maxiter=400)
        except (ValueError, RuntimeError) as exc:
            raise AccuracyError(f"partition root on ({lo}, {b}): {exc}") from exc
        if not lo < x < b:
            raise AccuracyError(f"partition root {x} left the interval ({lo}, {b})")
        cuts.append(x)
        b = x
    return Partition((lo, hi), tuple(sorted(cuts)), a)


def lemma_bound(P: Potential, interval: tuple[float, float], n: int, a: float) -> float:
    lo, hi = interval
    return (hi - lo) ** a * n ** (-1.0 - a) * _mass_fn(P)(lo, hi)
