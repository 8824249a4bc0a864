"""Fit the unnamed constants of the ζ-type estimates on a fixed corpus.

Each constant is the smallest value for which the estimate dominates every
certified count in the corpus. The corpus, the α grids and the resulting
numbers are written to the constants file together with a hash of the
corpus description, so a stale file can be detected.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .bounds import GAMMA_CLOSED_FORM, default_constants_path, gamma_quadrature
from .oscillate import count_bound_states
from .potential import load_potential, moment, zeta, zeta_half_sum
from .seq import weak_quasinorm

CORPUS = {
    "half": [
        "SquareWell:width=1,depth=1",
        "ExpDecay:rate=1",
        "Gaussian:scale=1",
        "PowerTail:p=3,offset=1",
        '{"family": "PiecewiseConstant", "params": {"edges": [0.5, 1, 3], "values": [4, 0.5]}}',
    ],
    "radial": ["ExpDecay:rate=1", "Gaussian:scale=1", "SquareWell:width=1,depth=1"],
    "alpha_half": [1.0, 1e4, 13],
    "alpha_radial": [1.0, 100.0, 9],
}


def corpus_hash(corpus: dict = CORPUS) -> str:
    return hashlib.sha256(json.dumps(corpus, sort_keys=True).encode()).hexdigest()[:16]


def _grid(spec):
    lo, hi, n = spec
    return np.geomspace(lo, hi, int(n))


def _round_up(x: float, digits: int = 4) -> float:
    if x <= 0:
        return 0.0
    e = math.floor(math.log10(x)) - digits + 1
    return float(f"{math.ceil(x / 10.0**e) * 10.0**e:.{digits}g}")


def calibrate(corpus: dict = CORPUS, verbose: bool = False) -> dict:
    from .radial2d import count_radial
    from .potential import log_transform

    ratios = {"dirichlet": 0.0, "neumann": 0.0, "line": 0.0, "radial": 0.0}
    for text in corpus["half"]:
        P = load_potential(text)
        L = P.with_domain("line")
        sums = {"dirichlet": zeta_half_sum(P, "dirichlet"), "neumann": zeta_half_sum(P, "neumann"), "line": zeta_half_sum(L, "line")}
        for a in _grid(corpus["alpha_half"]):
            for mode, offset in (("dirichlet", 0), ("neumann", 1), ("line", 1)):
                N = count_bound_states(L if mode == "line" else P, a, mode).upper
                r = max(N - offset, 0) / (math.sqrt(a) * sums[mode])
                ratios[mode] = max(ratios[mode], r)
        if verbose:
            print(text, ratios)
    for text in corpus["radial"]:
        F = load_potential(text)
        m1 = moment(F, 1)
        w = weak_quasinorm(zeta(log_transform(F), "line").entries, 1.0)
        for a in _grid(corpus["alpha_radial"]):
            N = count_radial(F, a).upper
            if w > 0:
                ratios["radial"] = max(ratios["radial"], (N - 1 - a * m1) / (a * w))
        if verbose:
            print(text, ratios)
    return {
        "gamma": gamma_quadrature(),
        "gamma_closed_form": GAMMA_CLOSED_FORM,
        "C_dirichlet": _round_up(ratios["dirichlet"]),
        "C_neumann": _round_up(ratios["neumann"]),
        "C_line": _round_up(ratios["line"]),
        "C_radial2d": _round_up(max(ratios["radial"], 0.0)),
        "calibration_corpus_hash": corpus_hash(corpus),
        "corpus": corpus,
        "raw_ratios": ratios,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description="recompute the calibrated constants")
    ap.add_argument("--out", default=str(default_constants_path()))
    args = ap.parse_args(argv)
    c = calibrate(verbose=True)
    Path(args.out).write_text(json.dumps(c, indent=2) + "\n")
    print(json.dumps({k: v for k, v in c.items() if k != "corpus"}, indent=2))


if __name__ == "__main__":
    main()
