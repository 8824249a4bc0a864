import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfline_spectra import ExpDecay, Gaussian, HardyTail, LogBorderline, PowerTail, SquareWell, Zero, zeta
from halfline_spectra import bsop
from halfline_spectra.bounds import zeta_lower
from halfline_spectra.oscillate import count_bound_states


def test_indicator_mass_is_standard_p1():
    n = 10
    nodes = np.linspace(0, 1, n + 1)[1:]
    p = bsop.assemble_bs(SquareWell(1, 1), nodes, "linear")
    h = 1.0 / n
    d = np.full(n, 2 * h / 3)
    d[-1] = h / 3
    assert np.allclose(p.M_diag, d, rtol=1e-10)
    assert np.allclose(p.M_off, h / 6, rtol=1e-10)
    K = p.stiffness.toarray()
    assert np.allclose(K, K.T) and np.all(np.linalg.eigvalsh(K) > 0)


def test_zero_potential_pencil():
    p = bsop.assemble_bs(Zero(), np.linspace(-3, 3, 20))
    assert not np.any(p.weighted_mass.toarray())
    assert np.all(p.eigenvalues() == 0)
    assert bsop.n_plus_bs(Zero(), 0.01).count == 0


def test_pencil_invariants_expdecay():
    nodes = bsop.bs_mesh(ExpDecay(1), 0.05)
    p = bsop.assemble_bs(ExpDecay(1), nodes)
    K = p.stiffness.toarray()
    M = p.weighted_mass.toarray()
    assert np.linalg.eigvalsh(K).min() > 0
    assert np.linalg.eigvalsh(M).min() > -1e-12 * np.abs(M).max()
    assert np.all(p.eigenvalues() >= 0)


def test_expdecay_top_in_hille_bracket():
    lam, conv = bsop.top_eigenvalue(ExpDecay(1))
    assert conv
    assert math.exp(-1) <= lam <= 4 * math.exp(-1)
    assert lam == pytest.approx(0.6916, abs=2e-4)


def test_refinement_monotone():
    P = ExpDecay(1)
    m0 = bsop.bs_mesh(P, 0.02)
    lam0 = bsop.bs_eigenvalues(P, m0, 4)
    lam1 = bsop.bs_eigenvalues(P, bsop.refine(m0), 4)
    assert np.all(lam1 >= lam0 * (1 - 1e-12))
    h = bsop.n_plus_bs(P, 1 / 200).history
    assert list(h) == sorted(h)


def test_count_matches_oscillation():
    for a in (30, 100):
        bs = bsop.n_plus_bs(ExpDecay(1), 1 / a)
        assert bs.converged and bs.count == count_bound_states(ExpDecay(1), a).lower


def test_count_above_eight_zeta_sup_is_zero():
    for P in (ExpDecay(1), SquareWell(1), PowerTail(3, 1)):
        zs = zeta(P, "dirichlet").sup
        assert bsop.n_plus_bs(P, 8.01 * zs).count == 0


@pytest.mark.parametrize("alpha,expected", [(30, 2), (1, 0)])
def test_bs_principle_square_well(alpha, expected):
    r = bsop.bs_principle_check(SquareWell(1), alpha)
    assert r.oscillation_count == r.bs_count == expected and r.equal


def test_bs_principle_expdecay_100():
    r = bsop.bs_principle_check(ExpDecay(1), 100)
    assert r.equal and r.bs_converged


def test_hille_examples():
    h = bsop.hille_bracket(ExpDecay(1))
    assert h["beta0"] == pytest.approx(math.exp(-1), rel=1e-8) and h["compact"]
    assert h["norm_bracket"][0] == h["beta0"]
    h = bsop.hille_bracket(SquareWell(1))
    assert h["beta0"] == pytest.approx(0.25, rel=1e-8) and h["compact"]
    h = bsop.hille_bracket(HardyTail(0.3))
    assert h["beta0"] == pytest.approx(0.3, rel=1e-6) and not h["compact"]


@pytest.mark.parametrize("P", [SquareWell(1), ExpDecay(1), Gaussian(1), PowerTail(3, 1), LogBorderline(2)], ids=str)
def test_norm_brackets(P):
    lam, conv = bsop.top_eigenvalue(P)
    h = bsop.hille_bracket(P)
    lo, hi = h["norm_bracket"]
    zlo, zhi = h["zeta_bracket"]
    assert conv and lo <= lam <= hi and zlo <= lam <= zhi


def test_finite_interval_constant():
    lam = bsop.finite_interval_eigs(SquareWell(1), (0, 1), 4)
    exact = [1 / (1 + ((k - 1) * math.pi) ** 2) for k in range(1, 5)]
    assert np.allclose(lam, exact, rtol=1e-3)
    assert lam[1] <= 0.25
    assert np.all(bsop.finite_interval_eigs(Zero(), (0, 1), 3) == 0)


def test_ns_diagnostic():
    assert bsop.ns_diagnostic(Zero(), [0.1, 0.01], (-5, 5)) == 0.0
    grid = np.geomspace(1e-3, 0.3, 12)
    a = bsop.ns_diagnostic(SquareWell(1), grid, (-6, 0))
    b = bsop.ns_diagnostic(SquareWell(1), grid, (-10, 6))
    assert 0 < a == b < math.inf
    c = bsop.ns_diagnostic(ExpDecay(1), grid, (-2, 2))
    d = bsop.ns_diagnostic(ExpDecay(1), grid, (-4, 5))
    assert d >= c


def test_trace_examples():
    r = bsop.trace_check(ExpDecay(1))
    assert r.moment1 == pytest.approx(1.0) and r.rel_gap < 0.01
    assert list(r.history) == sorted(r.history)
    r = bsop.trace_check(SquareWell(1))
    assert r.moment1 == pytest.approx(0.5) and r.rel_gap < 0.01
    r = bsop.trace_check(Zero())
    assert (r.discrete_trace, r.rel_gap) == (0.0, 0.0)
    assert not bsop.trace_check(PowerTail(2, 1)).applicable


def test_trace_equals_eigenvalue_sum():
    p = bsop.assemble_bs(ExpDecay(1), np.linspace(-6, 4, 80))
    assert p.trace() == pytest.approx(p.eigenvalues().sum(), rel=1e-10)


@settings(max_examples=10)
@given(st.sampled_from([ExpDecay(1), SquareWell(1), Gaussian(1), PowerTail(3, 1)]), st.floats(0.01, 1.0))
def test_lower_bound_theorem(P, frac):
    s = frac * zeta(P, "dirichlet").sup
    assert bsop.n_plus_bs(P, s).count >= zeta_lower(P, s)
