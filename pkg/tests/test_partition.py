import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import optimize

from halfline_spectra import ExpDecay, PiecewiseConstant, Sampled, SquareWell, Zero
from halfline_spectra.partition import Partition, build_partition, lemma_bound, phi

LINEAR = Sampled(grid=np.linspace(0, 1, 11), values=2 * np.linspace(0, 1, 11))


def test_constant_three_pieces():
    p = build_partition(SquareWell(1), (0, 1), 3, 1.0)
    assert p.breakpoints == pytest.approx((1 / 3, 2 / 3), abs=1e-10)
    assert phi(SquareWell(1), p) == pytest.approx(1 / 9, rel=1e-9)


def test_single_piece():
    p = build_partition(ExpDecay(1), (0, 2), 1, 0.5)
    assert p.breakpoints == ()
    assert phi(ExpDecay(1), p) == pytest.approx(2**0.5 * (1 - np.exp(-2)), rel=1e-10)


def test_linear_density_cubic_oracle():
    x = optimize.bisect(lambda x: (1 - x) ** 2 * (1 + x) - 0.25, 0, 1, xtol=1e-14)
    p = build_partition(LINEAR, (0, 1), 2, 1.0)
    assert p.breakpoints[0] == pytest.approx(x, abs=1e-9)
    assert x == pytest.approx(0.605, abs=1e-3)
    assert phi(LINEAR, p) == pytest.approx(0.25, abs=1e-6)
    assert phi(LINEAR, Partition((0, 1), (x,), 1.0)) == pytest.approx(max(x**3, 0.25), abs=1e-9)


@pytest.mark.parametrize("n,a,expect", [(4, 1.0, 4**-2), (5, 2.0, 5**-3)])
def test_phi_uniform(n, a, expect):
    p = Partition((0, 1), tuple(np.linspace(0, 1, n + 1)[1:-1]), a)
    assert phi(SquareWell(1), p) == pytest.approx(expect, rel=1e-10)


def test_zero_mass_uniform():
    p = build_partition(Zero(), (0, 1), 4, 1.0)
    assert p.breakpoints == pytest.approx((0.25, 0.5, 0.75))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        build_partition(SquareWell(1), (0, 1), 0, 1.0)
    with pytest.raises(ValueError):
        build_partition(SquareWell(1), (0, 1), 2, 0.0)
    with pytest.raises(ValueError):
        Partition((0, 1), (0.6, 0.4), 1.0)


_corpus = st.sampled_from([SquareWell(1), SquareWell(0.3, 2), ExpDecay(1), LINEAR, PiecewiseConstant(edges=(0, 0.2, 0.7, 1), values=(3, 0, 5))])


@given(_corpus, st.integers(1, 64), st.sampled_from([0.5, 1.0, 2.0]))
def test_lemma_bound(P, n, a):
    p = build_partition(P, (0, 1), n, a)
    mass = lemma_bound(P, (0, 1), 1, 0.0)
    assert p.n == n
    assert phi(P, p) <= lemma_bound(P, (0, 1), n, a) + 1e-9 * mass


@given(st.lists(st.floats(0, 10), min_size=1, max_size=8), st.integers(2, 40), st.sampled_from([0.5, 1.0, 2.0]))
def test_lemma_bound_random_steps(vals, n, a):
    edges = tuple(np.linspace(0, 1, len(vals) + 1))
    P = PiecewiseConstant(edges=edges, values=tuple(vals))
    p = build_partition(P, (0, 1), n, a)
    assert phi(P, p) <= lemma_bound(P, (0, 1), n, a) + 1e-9 * sum(vals)


def test_refinement_direction():
    P = ExpDecay(1)
    vals = [phi(P, build_partition(P, (0, 3), n, 1.0)) for n in (1, 2, 4, 8, 16, 32)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
