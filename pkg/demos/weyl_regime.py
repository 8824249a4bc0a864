"""Semi-classical growth for an exponentially decaying potential.

When ∫√G is finite the count behaves like (1/π) α^{1/2} ∫√G. Here
G = e^{-t}, so ∫√G = 2 and the ratio N/α^{1/2} should drift toward 2/π.
The explicit Bargmann and Calogero bounds sit above the count.
"""

import numpy as np

from halfline_spectra import ExpDecay
from halfline_spectra import bounds as B
from halfline_spectra.oscillate import count_bound_states
from halfline_spectra.seq import growth_exponent


def main():
    P = ExpDecay(1)
    rows = []
    print(f"{'alpha':>9} {'N':>5} {'N/sqrt(a)':>10} {'weyl':>8} {'calogero':>9} {'bargmann':>9}")
    for a in np.geomspace(10, 1e4, 10):
        N = count_bound_states(P, a).lower
        rows.append((a, N))
        print(
            f"{a:9.1f} {N:5d} {N / np.sqrt(a):10.4f} {B.weyl_term(P, a):8.2f} "
            f"{B.calogero(P, a).value:9.2f} {B.bargmann(P, a).value:9.1f}"
        )
    fit = growth_exponent(rows, decades=2)
    print(f"fitted exponent q = {fit.q_hat:.3f} +- {fit.stderr:.3f}  (semi-classical 1/2)")
    print(f"limit ratio 2/pi = {2 / np.pi:.4f}")


if __name__ == "__main__":
    main()
