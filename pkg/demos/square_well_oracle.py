"""Counting bound states of a square well and checking them against the closed form.

For G = 1 on (0, 1) with u(0) = 0 the zero-energy solution is sin(√α t)
inside the well. The count equals floor(√α/π), plus one more when the
outside continuation still turns down, i.e. when tan √α < 0.
"""

import math

import numpy as np

from halfline_spectra import SquareWell
from halfline_spectra.oscillate import count_bound_states


def oracle(alpha):
    r = math.sqrt(alpha)
    return int(r // math.pi) + (math.tan(r) < 0)


def main():
    P = SquareWell(1)
    print(f"{'alpha':>10} {'counter':>8} {'oracle':>7} {'tail':>10}")
    for a in np.geomspace(1, 1e4, 12):
        c = count_bound_states(P, a)
        print(f"{a:10.2f} {c.lower:8d} {oracle(a):7d} {c.tail_bound:10.2e}")
    # the count jumps exactly where √α crosses an odd multiple of π/2
    for k in (1, 3, 5):
        a = (k * math.pi / 2) ** 2
        lo, hi = count_bound_states(P, a * 0.999).lower, count_bound_states(P, a * 1.001).lower
        print(f"threshold sqrt(alpha) = {k}pi/2: {lo} -> {hi}")


if __name__ == "__main__":
    main()
