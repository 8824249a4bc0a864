import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from halfline_spectra import ConfigError, DomainError, ExpDecay, Gaussian, LogBorderline, PowerTail, Sampled, SquareWell, Zero, zeta
from halfline_spectra import bounds as B
from halfline_spectra.oscillate import count_bound_states
from halfline_spectra.potential import sqrt_mass
from halfline_spectra.seq import n_plus


def test_bargmann_examples():
    assert B.bargmann(SquareWell(1), 30).value == pytest.approx(15.0)
    assert B.bargmann(ExpDecay(1), 7).value == pytest.approx(7.0)
    assert B.bargmann(Zero(), 3).value == 0.0
    r = B.bargmann(PowerTail(2, 1), 1.0)
    assert r.value == math.inf and r.applicable


def test_bargmann_needs_half_line():
    with pytest.raises(DomainError):
        B.bargmann(Gaussian(domain="line"), 1.0)


def test_calogero_examples():
    assert B.calogero(ExpDecay(1), 1).value == pytest.approx(4 / math.pi)
    assert B.calogero(SquareWell(1), 25).value == pytest.approx(10 / math.pi)


def test_calogero_inapplicable_for_two_bumps():
    t = np.linspace(0, 4, 401)
    g = np.exp(-((t - 1) ** 2) * 8) + np.exp(-((t - 3) ** 2) * 8)
    r = B.calogero(Sampled(grid=t, values=g), 10.0)
    assert not r.applicable and r.reason


def test_birman_borzov_examples():
    bb = B.birman_borzov(ExpDecay(1), 1.0, lambda t: math.exp(t / 2))
    assert bb.R == pytest.approx(2.0, rel=1e-8) and bb.S == pytest.approx(2.0, rel=1e-8)
    assert bb.product_form == pytest.approx(4.0, rel=1e-7)
    assert bb.provenance is B.Provenance.UNKNOWN_C
    assert B.birman_borzov(ExpDecay(1), 1.0, lambda t: 1.0).R == math.inf
    pt = B.birman_borzov(PowerTail(3, 1), 1.0, lambda t: (1 + t) ** 1.5)
    assert pt.R == pytest.approx(2.0, rel=1e-7) and pt.S == pytest.approx(2.0, rel=1e-7)


@given(st.sampled_from([ExpDecay(1), ExpDecay(0.5), PowerTail(3, 1), Gaussian(1)]), st.floats(0.2, 0.8))
def test_birman_borzov_cauchy_schwarz(P, p):
    bb = B.birman_borzov(P, 1.0, lambda t: (1 + t) ** (1 + p))
    if math.isfinite(bb.R) and math.isfinite(bb.S):
        assert math.sqrt(bb.R * bb.S) >= sqrt_mass(P) * (1 - 1e-8)


def test_zeta_upper_square_well():
    c = B.load_constants()
    r = B.zeta_upper(SquareWell(1), 9.0, "dirichlet")
    assert r.value == pytest.approx(c["C_dirichlet"] * 3 * math.sqrt(2), rel=1e-6)
    assert r.provenance is B.Provenance.CALIBRATED


def test_zeta_upper_divergent():
    r = B.zeta_upper(LogBorderline(1), 10.0, "dirichlet")
    assert r.value == math.inf and r.extra["divergent"]


def test_zeta_upper_zero_is_offset():
    assert B.zeta_upper(Zero(), 10.0, "dirichlet").value == 0.0
    assert B.zeta_upper(Zero(), 10.0, "neumann").value == 1.0
    assert B.zeta_upper(Zero(domain="line"), 10.0, "line").value == 1.0


def test_zeta_upper_mode_mismatch():
    with pytest.raises(DomainError):
        B.zeta_upper(ExpDecay(1), 1.0, "line")


def test_gamma_pinned():
    c = B.load_constants()
    assert B.gamma_quadrature() == pytest.approx(B.GAMMA_CLOSED_FORM, rel=1e-12)
    assert c["gamma"] == pytest.approx(B.GAMMA_CLOSED_FORM, rel=1e-12)


def test_bump_shape():
    assert B.bump(0.75) == 1.0 and B.bump(0.5) == 1.0 and B.bump(1.0) == 1.0
    assert B.bump(0.3) == 0.0 and B.bump(1.5) == 0.0
    t = np.linspace(0.2, 1.6, 2001)
    f = B.bump(t)
    assert np.all((f >= 0) & (f <= 1))


def test_zeta_lower_examples():
    g = B.load_constants()["gamma"]
    zs = zeta(ExpDecay(1), "dirichlet").sup
    assert B.zeta_lower(ExpDecay(1), 1.01 * zs / g) == 0
    assert B.zeta_lower(SquareWell(1), 0.4 / g) >= 1
    # grows like (γ s ln2)^{-1}/2 for the q = 1 borderline family
    s = 1e-3 / g
    seqs = zeta(LogBorderline(1), "dirichlet", (1, 4096))
    expect = (n_plus(g * s, seqs.entries) + 1) // 2
    assert B.zeta_lower(LogBorderline(1), s) == expect
    assert expect == pytest.approx(1 / (g * s * math.log(2)) / 2, rel=0.05)


def test_weyl_term_examples():
    assert B.weyl_term(ExpDecay(1), 1e4) == pytest.approx(200 / math.pi)
    assert B.weyl_term(SquareWell(1), 900) == pytest.approx(30 / math.pi)
    assert B.weyl_term(Zero(), 5.0) == 0.0
    assert B.weyl_term(LogBorderline(1), 5.0) == math.inf


def test_weyl_consistency_at_largest_alpha():
    N = count_bound_states(ExpDecay(1), 1e4).lower
    assert 0.95 <= N / B.weyl_term(ExpDecay(1), 1e4) <= 1.05


def test_mar_bound_examples():
    r = B.mar_bound(Gaussian(domain="line"), 2.0)
    assert r.value == pytest.approx(1 + 2 * (math.pi / 2) ** 0.25, rel=1e-9)
    assert B.mar_bound(Zero(domain="line"), 2.0).value == 1.0
    assert B.mar_bound(PowerTail(2.5, 1, domain="line"), 2.0).value == math.inf


def test_radial2d_bound_examples():
    c = B.load_constants()
    assert B.radial2d_bound(Zero(), 3.0).value == 1.0
    r1 = B.radial2d_bound(ExpDecay(1), 1.0)
    w = r1.extra["weak_l1"]
    assert r1.value == pytest.approx(1 + 1 + c["C_radial2d"] * w, rel=1e-9)
    r2 = B.radial2d_bound(ExpDecay(1), 2.0)
    assert r2.value - 1 == pytest.approx(2 * (r1.value - 1), rel=1e-12)


def test_custom_constants_file(tmp_path):
    c = B.load_constants()
    c["C_dirichlet"] = 2.0
    p = tmp_path / "c.json"
    p.write_text(json.dumps(c))
    custom = B.load_constants(p)
    r = B.zeta_upper(SquareWell(1), 4.0, "dirichlet", custom)
    assert r.value == pytest.approx(2.0 * 2 * math.sqrt(2))


def test_bad_constants_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"gamma": 1.0}))
    with pytest.raises(ConfigError):
        B.load_constants(p)


_corpus = st.sampled_from([SquareWell(1), ExpDecay(1), Gaussian(1), PowerTail(3, 1), SquareWell(2, 0.3)])


@given(_corpus, st.floats(0.5, 2000))
def test_explicit_bounds_dominate(P, alpha):
    N = count_bound_states(P, alpha)
    assert N.exact
    assert N.upper <= B.bargmann(P, alpha).value * (1 + 1e-12)
    cal = B.calogero(P, alpha)
    if cal.applicable:
        assert N.upper <= cal.value * (1 + 1e-12)


@given(_corpus, st.floats(0.5, 500))
def test_mar_bound_dominates_line(P, alpha):
    L = P.with_domain("line")
    N = count_bound_states(L, alpha, "line")
    assert N.exact and N.upper <= B.mar_bound(L, alpha).value * (1 + 1e-12)
