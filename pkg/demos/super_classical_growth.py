"""Faster-than-Weyl growth for the borderline family t^{-2} (ln t)^{-1/q}.

In log coordinates s = ln t the weight t²G equals s^{-1/q}, so the
dyadic sequence ζ_j decays like j^{-1/q} and lies in weak-ℓ_q but not in
ℓ_{1/2}. The count then grows like α^q. For q = 1 the tail coefficient
of ζ tends to 1/ln 2.
"""

import math

import numpy as np

from halfline_spectra import LogBorderline, zeta
from halfline_spectra.oscillate import count_bound_states
from halfline_spectra.seq import growth_exponent, tail_functionals


def main():
    for q in (1.0, 2.0):
        P = LogBorderline(q)
        lo, top = (1e2, 1e4) if q == 1 else (3.0, 30.0)
        pts = []
        for a in np.geomspace(lo, top, 7):
            c = count_bound_states(P, a)
            pts.append((a, c.lower))
            print(f"q={q:g} alpha={a:10.2f} N={c.lower:7d} coords={c.coords}")
        fit = growth_exponent(pts, decades=math.log10(top / lo))
        print(f"q={q:g}: fitted exponent {fit.q_hat:.3f} +- {fit.stderr:.3f}\n")
    rep = tail_functionals(zeta(LogBorderline(1), "dirichlet", (64, 4096)).entries, 1.0)
    print(f"tail coefficient of zeta for q=1: {rep.delta_upper:.4f} (1/ln 2 = {1 / math.log(2):.4f})")


if __name__ == "__main__":
    main()
