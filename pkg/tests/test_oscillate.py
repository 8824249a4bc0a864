import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from halfline_spectra import ConfigError, ExpDecay, Gaussian, LogBorderline, PowerTail, SquareWell, Zero
from halfline_spectra.oscillate import Control, count_bound_states, count_line, prufer_trace
from halfline_spectra.potential import Potential, halves


def square_well_oracle(alpha):
    r = math.sqrt(alpha)
    return math.floor(r / math.pi) + (1 if math.tan(r) < 0 else 0)


def exp_dirichlet_oracle(alpha):
    # u = J_0(2√α e^{-t/2}) vanishing at t = 0
    z = special.jn_zeros(0, 200)
    return int(np.count_nonzero(z < 2 * math.sqrt(alpha)))


def exp_neumann_oracle(alpha):
    z = special.jn_zeros(1, 200)
    return 1 + int(np.count_nonzero(z < 2 * math.sqrt(alpha)))


@pytest.mark.parametrize("alpha, expected", [(30, 2), (1, 0), (900, 10)])
def test_square_well_examples(alpha, expected):
    r = count_bound_states(SquareWell(1), alpha, "dirichlet")
    assert (r.lower, r.upper) == (expected, expected)
    assert expected == square_well_oracle(alpha)


@pytest.mark.parametrize("alpha", [1, 5, 10, 25, 50, 100, 1e3, 1e4])
def test_exp_decay_bessel_oracle(alpha):
    r = count_bound_states(ExpDecay(1), alpha, "dirichlet")
    assert r.exact and r.lower == exp_dirichlet_oracle(alpha)


@pytest.mark.parametrize("alpha", [10, 100, 1000])
def test_exp_decay_neumann_oracle(alpha):
    r = count_bound_states(ExpDecay(1), alpha, "neumann")
    assert r.exact and r.lower == exp_neumann_oracle(alpha)


@pytest.mark.parametrize("alpha", [3.0, 40.0, 400.0])
def test_linear_and_log_coordinates_agree(alpha):
    for P in (ExpDecay(1), Gaussian(1), PowerTail(3, 1)):
        a = count_bound_states(P, alpha, "dirichlet", Control(coords="linear"))
        b = count_bound_states(P, alpha, "dirichlet", Control(coords="log"))
        assert a.exact and b.exact and a.lower == b.lower


def test_log_borderline_needs_log_coordinates():
    r = count_bound_states(LogBorderline(1), 100.0)
    assert r.exact and r.coords == "log"
    assert 80 <= r.lower <= 110  # N grows like α


def test_zero_potential_counts_nothing():
    for bc in ("dirichlet", "neumann"):
        assert count_bound_states(Zero(), 50.0, bc).upper == 0
    assert count_bound_states(Zero(domain="line"), 50.0, "line").upper == 0


def test_invalid_inputs():
    with pytest.raises(ValueError):
        count_bound_states(ExpDecay(1), 0.0)
    with pytest.raises(ConfigError):
        Control(coords="polar")


# -- traces -------------------------------------------------------------------


def test_trace_free_flow():
    tr = prufer_trace(Zero(), 1.0, "dirichlet", T=10.0)
    assert tr.theta[-1] == pytest.approx(math.atan(10.0), rel=1e-7)


def test_trace_square_well_crosses_pi_at_edge():
    tr = prufer_trace(SquareWell(1), math.pi**2, "dirichlet", T=1.0)
    assert tr.t[-1] == pytest.approx(1.0)
    assert tr.theta[-1] == pytest.approx(math.pi, rel=1e-7)


def test_trace_weak_coupling_stays_below_half_pi():
    tr = prufer_trace(ExpDecay(1), 1e-3, "dirichlet", T=200.0)
    assert tr.theta.max() < math.pi / 2


@given(st.sampled_from([ExpDecay(1), Gaussian(1), SquareWell(1, 3)]), st.floats(0.5, 300), st.sampled_from(["dirichlet", "neumann"]))
def test_trace_monotone_and_initial_angle(P, alpha, bc):
    tr = prufer_trace(P, alpha, bc, T=8.0)
    assert np.all(np.diff(tr.theta) >= -1e-9)
    assert tr.theta[0] == (0.0 if bc == "dirichlet" else math.pi / 2)


# -- invariants ---------------------------------------------------------------

_pots = st.sampled_from([ExpDecay(1), Gaussian(2.0), PowerTail(3, 1), SquareWell(2.0, 0.5)])


@given(_pots, st.floats(0.5, 500), st.floats(0.5, 500))
def test_monotone_in_alpha(P, a1, a2):
    lo, hi = sorted((a1, a2))
    r1, r2 = count_bound_states(P, lo), count_bound_states(P, hi)
    assert r1.lower <= r2.upper
    if r1.exact and r2.exact:
        assert r1.lower <= r2.lower


@given(_pots, st.floats(0.5, 500))
def test_neumann_dirichlet_codimension_one(P, alpha):
    d = count_bound_states(P, alpha, "dirichlet")
    n = count_bound_states(P, alpha, "neumann")
    assert d.exact and n.exact
    assert 0 <= n.lower - d.lower <= 1


@given(_pots, st.floats(0.5, 300))
def test_line_split_bracket(P, alpha):
    L = P.with_domain("line")
    left, right = halves(L)
    nl = count_bound_states(L, alpha, "line")
    dl = count_bound_states(left, alpha, "dirichlet")
    dr = count_bound_states(right, alpha, "dirichlet")
    assert nl.exact
    assert dl.lower + dr.lower <= nl.lower <= dl.lower + dr.lower + 1


@given(_pots, st.floats(0.5, 300))
def test_even_line_parity_split(P, alpha):
    nl = count_bound_states(P.with_domain("line"), alpha, "line")
    d = count_bound_states(P, alpha, "dirichlet")
    n = count_bound_states(P, alpha, "neumann")
    assert nl.lower == d.lower + n.lower


@given(_pots, st.floats(0.5, 2000))
def test_bracket_invariants(P, alpha):
    r = count_bound_states(P, alpha)
    assert r.lower <= r.upper
    if r.upper < math.inf:
        assert r.upper - r.lower <= 1 + math.floor(r.tail_bound)
    if r.tail_bound < 1:
        assert r.lower == r.upper


def test_massive_line_channel_counts_fewer():
    L = Gaussian(1, domain="line")
    counts = [count_line(L, 200.0, k).lower for k in (0.0, 1.0, 3.0, 6.0)]
    assert counts == sorted(counts, reverse=True)
    assert count_line(L, 200.0, 100.0).upper == 0


@dataclass(frozen=True)
class _InverseSqrtTimesExp(Potential):
    """``t^{-3/2} e^{-t}``: not integrable at 0, but ``∫ tG`` is finite."""

    def _g(self, t):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(t > 0, np.maximum(t, 1e-300) ** -1.5 * np.exp(-t), np.inf)

    def t2g(self, s, side=1):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            return np.exp(0.5 * s - np.exp(s))

    def head_sup(self, s, side=1):
        return math.exp(0.5 * min(s, math.log(0.5)) - math.exp(min(s, math.log(0.5))))

    singular_at_zero = property(lambda self: True)

    def moment_finite(self, k):
        return k >= 1


def test_singular_origin_matches_galerkin_count():
    from halfline_spectra.bsop import n_plus_bs

    P = _InverseSqrtTimesExp()
    for alpha in (2.0, 20.0):
        r = count_bound_states(P, alpha, "dirichlet")
        assert r.exact
        assert r.lower == n_plus_bs(P, 1 / alpha).count
