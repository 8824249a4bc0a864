import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from halfline_spectra import (
    ConfigError,
    DomainError,
    ExpDecay,
    Gaussian,
    LogBorderline,
    PiecewiseConstant,
    PowerTail,
    Sampled,
    SquareWell,
    Zero,
    load_potential,
    log_transform,
    moment,
    sqrt_mass,
    zeta,
)
from halfline_spectra.potential import Dilated, HardyTail, Sum, is_monotone, probe_nonnegative, zeta_half_sum


# -- evaluation ---------------------------------------------------------------


def test_eval_square_well_inside():
    assert SquareWell(width=1)(0.5) == 1.0


def test_eval_log_borderline_closed_form():
    assert LogBorderline(q=1)(math.e**2) == pytest.approx(math.exp(-4) / 2, rel=1e-12)
    assert LogBorderline(q=1)(2.0) == 0.0


def test_eval_exp_decay_at_origin():
    assert ExpDecay(rate=1)(0.0) == 1.0


def test_eval_rejects_negative_t_on_half_line():
    with pytest.raises(DomainError):
        ExpDecay()(-0.1)
    with pytest.raises(DomainError):
        ExpDecay()(float("nan"))


def test_line_potential_is_even():
    G = Gaussian(domain="line")
    assert G(-0.7) == pytest.approx(G(0.7))


# -- integrals ----------------------------------------------------------------


def test_moment_examples():
    assert moment(ExpDecay(1), 1) == pytest.approx(1.0, rel=1e-9)
    assert moment(SquareWell(1), 0) == pytest.approx(1.0, rel=1e-12)
    assert moment(Gaussian(domain="line"), 2) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-9)


def test_moment_divergence_certificate():
    assert moment(PowerTail(p=2, offset=1), 1) == math.inf
    assert moment(LogBorderline(q=1), 1) == math.inf
    assert math.isfinite(moment(LogBorderline(q=1), 0))


def test_moment_on_interval():
    assert moment(ExpDecay(1), 0, (0.0, 1.0)) == pytest.approx(1 - math.exp(-1), rel=1e-10)


@pytest.mark.parametrize("P, expected", [(ExpDecay(1), 2.0), (SquareWell(1), 1.0), (LogBorderline(1), math.inf)])
def test_sqrt_mass(P, expected):
    v = sqrt_mass(P)
    if math.isinf(expected):
        assert v == math.inf
    else:
        assert v == pytest.approx(expected, rel=1e-9)


# -- zeta ---------------------------------------------------------------------


def test_zeta_constant_truncated():
    seq = zeta(SquareWell(width=2.0**10, depth=1.0), "dirichlet", (1, 10))
    for j in range(1, 11):
        assert seq[j] == pytest.approx(2.0 ** (2 * j - 1), rel=1e-10)


def test_zeta_square_well():
    seq = zeta(SquareWell(1), "dirichlet", (0, 3))
    assert seq[0] == pytest.approx(0.5, rel=1e-12)
    assert [seq[j] for j in (1, 2, 3)] == [0.0, 0.0, 0.0]


def _log_borderline_entry(j):
    # independent oracle: with t = 2^{j-1} u the entry is 2 ∫_1^2 du / (u² ln t)
    c = (j - 1) * math.log(2.0)
    v, _ = integrate.quad(lambda u: 1.0 / (u * u * (c + math.log(u))), 1.0, 2.0, epsrel=1e-12)
    return 2.0 * v


@pytest.mark.parametrize("j", [64, 200, 1000])
def test_zeta_log_borderline_asymptotics(j):
    seq = zeta(LogBorderline(1), "dirichlet", (j, j))
    assert seq[j] == pytest.approx(_log_borderline_entry(j), rel=1e-8)
    assert seq[j] * j * math.log(2) == pytest.approx(1.0, rel=0.05)


def test_zeta_modes_first_entry():
    G = ExpDecay(1)
    assert zeta(G, "neumann", (0, 3))[0] == pytest.approx(moment(G, 0, (0, 1)), rel=1e-10)
    L = Gaussian(domain="line")
    assert zeta(L, "line", (0, 3))[0] == pytest.approx(math.sqrt(math.pi) * math.erf(1), rel=1e-10)


def test_zeta_neumann_window_starts_at_zero():
    with pytest.raises(ConfigError):
        zeta(ExpDecay(1), "neumann", (-2, 3))


def test_zeta_line_mode_needs_line_domain():
    with pytest.raises((ConfigError, DomainError)):
        zeta(ExpDecay(1), "line", (0, 3))


def test_zeta_entries_independent_of_window():
    G = PowerTail(p=3, offset=1)
    a = zeta(G, "dirichlet", (-3, 4))
    b = zeta(G, "dirichlet", (-6, 9))
    for j in range(-3, 5):
        assert a[j] == b[j]


def test_zeta_moment_weight_variant():
    G = ExpDecay(1)
    seq = zeta(G, "dirichlet", (-2, 2), weight="moment")
    assert seq[1] == pytest.approx(moment(G, 1, (1.0, 2.0)), rel=1e-10)


# -- log transform ------------------------------------------------------------


def test_log_transform_examples():
    F = ExpDecay(1)
    d = log_transform(F, "derivation")
    t = log_transform(F, "theorem")
    assert d.g(np.array([0.0]))[0] == pytest.approx(math.exp(-1))
    assert d.g(np.array([-2.0]))[0] == pytest.approx(math.exp(-4) * math.exp(-math.exp(-2)), rel=1e-12)
    assert t.g(np.array([-2.0]))[0] == pytest.approx(math.exp(4) * math.exp(-math.exp(-2)), rel=1e-12)


def test_log_transform_theorem_convention_left_growth_flagged():
    t = log_transform(ExpDecay(1), "theorem")
    assert t.moment_finite(0) is False


# -- invariants ---------------------------------------------------------------

_fam = st.sampled_from([ExpDecay(1.0), Gaussian(1.0), PowerTail(3.0, 1.0), SquareWell(1.0, 2.0), ExpDecay(0.3)])


@given(_fam, _fam, st.integers(-4, 6))
def test_dyadic_additivity(G1, G2, j):
    s = zeta(Sum(terms=(G1, G2)), "dirichlet", (j, j))[j]
    parts = zeta(G1, "dirichlet", (j, j))[j] + zeta(G2, "dirichlet", (j, j))[j]
    assert s == pytest.approx(parts, rel=2e-10, abs=1e-300)


@given(_fam, st.integers(-3, 3), st.integers(-3, 5))
def test_scaling_covariance(G, m, j):
    lam = 2.0**m
    lhs = zeta(Dilated(base=G, lam=lam), "dirichlet", (j, j))[j]
    rhs = zeta(G, "dirichlet", (j + m, j + m))[j + m]
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-300)


@given(_fam)
def test_first_moment_bracket(G):
    seq = zeta(G, "dirichlet")
    total = float(np.sum(seq.entries))
    m1 = moment(G, 1)
    assert total / 2 * (1 - 1e-9) <= m1 <= total * (1 + 1e-9)


@given(st.lists(st.floats(0.0, 5.0), min_size=1, max_size=6), st.floats(0.1, 2.0))
def test_piecewise_constant_nonnegative_and_mass(values, width):
    edges = tuple(width * k for k in range(len(values) + 1))
    P = PiecewiseConstant(edges=edges, values=tuple(values))
    assert probe_nonnegative(P)
    assert moment(P, 0) == pytest.approx(width * sum(values), rel=1e-9, abs=1e-12)


# -- construction -------------------------------------------------------------


def test_negative_values_rejected():
    with pytest.raises(ConfigError):
        PiecewiseConstant(edges=(0, 1), values=(-1.0,))
    with pytest.raises(ConfigError):
        Sampled(grid=[0, 1, 2], values=[1.0, -0.5, 0.0])


def test_load_potential_inline_and_json(tmp_path):
    P = load_potential("ExpDecay:rate=2")
    assert P == ExpDecay(rate=2.0)
    L = load_potential("Gaussian:scale=1@line")
    assert L.domain.value == "line"
    path = tmp_path / "g.json"
    path.write_text(json.dumps(PowerTail(3, 1).spec()))
    assert load_potential(str(path)) == PowerTail(3.0, 1.0)
    assert load_potential(P.spec()) == P


def test_load_sampled_file(tmp_path):
    data = tmp_path / "g.txt"
    np.savetxt(data, np.column_stack([np.linspace(0, 2, 21), np.linspace(2, 0, 21)]))
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"family": "Sampled", "params": {"file": "g.txt"}, "domain": "half"}))
    P = load_potential(str(spec))
    assert moment(P, 0) == pytest.approx(2.0, rel=1e-9)
    assert is_monotone(P)


def test_load_potential_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_potential(str(bad))
    with pytest.raises(ConfigError):
        load_potential("NoSuchFamily:x=1")


def test_zero_potential():
    Z = Zero()
    assert moment(Z, 1) == 0.0
    assert zeta_half_sum(Z) == 0.0


def test_hardy_tail_zeta_constant():
    seq = zeta(HardyTail(c=0.5), "dirichlet", (2, 6))
    assert np.allclose(seq.entries, 0.5, rtol=1e-9)  # 2^j ∫ c t^{-2} over I_j = c
