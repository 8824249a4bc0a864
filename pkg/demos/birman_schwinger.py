"""Two independent routes to the same integer.

The oscillation counter integrates a Prüfer angle; the Galerkin pencil
counts eigenvalues of ∫G|u|² / ∫|u'|² above 1/α by matrix inertia. The
two agree exactly. The largest pencil eigenvalue lands inside the
Hille bracket [β₀, 4β₀], and the pencil trace approaches ∫ tG.
"""

from halfline_spectra import ExpDecay, Gaussian, PowerTail, SquareWell
from halfline_spectra import bsop


def main():
    for P in (SquareWell(1), ExpDecay(1), Gaussian(1), PowerTail(3, 1)):
        print(type(P).__name__)
        for a in (1, 10, 100, 1000):
            r = bsop.bs_principle_check(P, a)
            flag = "=" if r.equal else "!="
            print(f"  alpha={a:5d}: oscillation {r.oscillation_count:3d} {flag} pencil {r.bs_count:3d}")
        lam, _ = bsop.top_eigenvalue(P)
        h = bsop.hille_bracket(P)
        lo, hi = h["norm_bracket"]
        print(f"  top eigenvalue {lam:.5f} in [{lo:.5f}, {hi:.5f}]")
        tr = bsop.trace_check(P)
        print(f"  trace {tr.discrete_trace:.5f} vs first moment {tr.moment1:.5f} (gap {tr.rel_gap:.1e})")


if __name__ == "__main__":
    main()
