"""``halfline-spectra`` command-line driver."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds as B
from .errors import ConfigError, SpectraError
from .oscillate import Control, count_bound_states
from .potential import Domain, Potential, load_potential, zeta

EXIT_CONFIG = 2
EXIT_FAILURE = 1
CSV_COLUMNS = ("alpha", "n_lower", "n_upper", "tail_bound", "coords", "runtime_ms")


@dataclass
class SweepConfig:
    potential: str
    bc: str = "dirichlet"
    alpha_min: float = 1.0
    alpha_max: float = 100.0
    alpha_points: int = 10
    tol: float = 1e-8
    fmt: str = "csv"
    out: str | None = None
    constants: str | None = None
    timing: bool = True
    extra: dict = field(default_factory=dict)

    def alphas(self) -> np.ndarray:
        if not (self.alpha_min > 0 and self.alpha_max >= self.alpha_min):
            raise ConfigError("need 0 < alpha-min <= alpha-max")
        if self.alpha_points < 1 or (self.alpha_points == 1 and self.alpha_max != self.alpha_min):
            raise ConfigError("alpha-points must be >= 2 for a range")
        if self.alpha_points == 1:
            return np.array([self.alpha_min])
        if self.alpha_max == self.alpha_min:
            raise ConfigError("alpha grid must be strictly increasing")
        # 12 digits keeps interior points free of representation noise (30, not 29.999...)
        grid = np.array([float(f"{a:.12g}") for a in np.geomspace(self.alpha_min, self.alpha_max, self.alpha_points)])
        if np.any(np.diff(grid) <= 0):
            raise ConfigError("alpha grid too fine to be strictly increasing")
        return grid

    def echo(self) -> dict:
        return {
            "potential": self.potential,
            "bc": self.bc,
            "alpha_min": self.alpha_min,
            "alpha_max": self.alpha_max,
            "alpha_points": self.alpha_points,
            "tol": self.tol,
            **self.extra,
        }


def _potential_for(cfg: SweepConfig) -> Potential:
    P = load_potential(cfg.potential)
    if cfg.bc == "line" and P.domain is Domain.HALF:
        P = P.with_domain("line")
    if cfg.bc != "line" and P.domain is Domain.LINE:
        raise ConfigError(f"bc {cfg.bc} needs a half-line potential")
    return P


def _workers() -> int:
    raw = os.environ.get("HALFLINE_SPECTRA_THREADS")
    cap = os.cpu_count() or 1
    if raw is None:
        return cap
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("HALFLINE_SPECTRA_THREADS must be an integer") from None
    if n < 1:
        raise ConfigError("HALFLINE_SPECTRA_THREADS must be >= 1")
    return min(n, cap)


def _count_one(args):
    P, alpha, bc, tol = args
    t0 = time.perf_counter()
    try:
        r = count_bound_states(P, alpha, bc, Control(ode_rel_tol=tol))
        rec = {
            "alpha": alpha,
            "n_lower": r.lower,
            "n_upper": r.upper,
            "tail_bound": r.tail_bound,
            "coords": r.coords,
            "exact": r.exact,
            "error": "",
        }
    except SpectraError as exc:
        rec = {"alpha": alpha, "n_lower": "", "n_upper": "", "tail_bound": "", "coords": "", "exact": False, "error": str(exc)}
    rec["runtime_ms"] = round(1e3 * (time.perf_counter() - t0), 3)
    return rec


def _map(fn, items):
    """Ordered map over a process pool (serial for one worker or one item)."""
    n = _workers()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(n, len(items))) as ex:
        return list(ex.map(fn, items))


def run_counts(cfg: SweepConfig) -> list[dict]:
    P = _potential_for(cfg)
    recs = _map(_count_one, [(P, float(a), cfg.bc, cfg.tol) for a in cfg.alphas()])
    if not cfg.timing:
        for r in recs:
            r["runtime_ms"] = 0
    return recs


def _constants_hash(cfg: SweepConfig) -> str:
    path = Path(cfg.constants) if cfg.constants else B.default_constants_path()
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))
    return v


def _emit(cfg: SweepConfig, records: list[dict], columns, summary: dict | None = None) -> str:
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow({k: _fmt(r.get(k, "")) for k in columns})
        text = buf.getvalue()
        if summary:
            text += "".join(f"# {k}: {_fmt(v)}\n" for k, v in summary.items())
    else:
        doc = {"config": cfg.echo(), "constants_hash": _constants_hash(cfg), "records": records}
        if summary:
            doc["summary"] = summary
        text = json.dumps(doc, indent=2, default=_json_default, allow_nan=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return text


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serialisable: {type(o)}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_count(cfg: SweepConfig) -> int:
    recs = run_counts(cfg)
    _emit(cfg, recs, CSV_COLUMNS)
    return 0 if all(not r["error"] for r in recs) else EXIT_FAILURE


def cmd_bounds(cfg: SweepConfig) -> int:
    P = _potential_for(cfg)
    consts = B.load_constants(cfg.constants)
    recs = []
    for a in cfg.alphas():
        a = float(a)
        panel = []
        if P.domain is Domain.HALF:
            panel += [B.bargmann(P, a), B.calogero(P, a)]
            panel.append(B.zeta_upper(P, a, cfg.bc, consts))
        else:
            panel += [B.mar_bound(P, a), B.zeta_upper(P, a, "line", consts)]
        w = B.weyl_term(P, a)
        panel.append(B.EstimateReport("weyl", w, math.isfinite(w), "" if math.isfinite(w) else "∫√G diverges", B.Provenance.EXPLICIT))
        for rep in panel:
            recs.append({"alpha": a, "name": rep.name, "value": rep.value, "applicable": rep.applicable, "reason": rep.reason, "provenance": rep.provenance.value})
    _emit(cfg, recs, ("alpha", "name", "value", "applicable", "reason", "provenance"))
    return 0


def cmd_sweep_fit(cfg: SweepConfig) -> int:
    from .potential import zeta_half_sum
    from .seq import growth_exponent, predicted_exponent

    if cfg.alpha_points < 5:
        raise ConfigError("sweep-fit needs >= 5 alpha points")
    recs = run_counts(cfg)
    good = [(r["alpha"], r["n_lower"]) for r in recs if r["exact"] and r["n_lower"] >= 1]
    P = _potential_for(cfg)
    mode = cfg.bc
    summable = math.isfinite(zeta_half_sum(P, mode))
    summary: dict = {"n_fit_points": len(good)}
    try:
        fit = growth_exponent(good, decades=cfg.extra.get("decades", 1.0))
        summary.update(q_hat=fit.q_hat, stderr=fit.stderr)
    except SpectraError as exc:
        summary.update(q_hat=None, stderr=None, fit_error=str(exc))
        _emit(cfg, recs, CSV_COLUMNS, summary)
        return EXIT_FAILURE
    try:
        pred = predicted_exponent(zeta(P, mode).entries, summable)
    except SpectraError as exc:
        pred = None
        summary["prediction_error"] = str(exc)
    summary["prediction"] = pred
    summary["match"] = pred is not None and abs(fit.q_hat - pred) <= max(0.1, 2 * fit.stderr)
    _emit(cfg, recs, CSV_COLUMNS, summary)
    return 0


def cmd_zeta(cfg: SweepConfig) -> int:
    P = _potential_for(cfg)
    seq = zeta(P, cfg.bc)
    recs = [{"j": int(j), "zeta": float(v)} for j, v in zip(seq.indices, seq.entries)]
    summary = {"mode": seq.mode.value, "sup": seq.sup, "half_sum": seq.half_sum(), "closed_lo": seq.closed_lo, "closed_hi": seq.closed_hi}
    _emit(cfg, recs, ("j", "zeta"), summary)
    return 0


def cmd_bs_check(cfg: SweepConfig) -> int:
    from .bsop import bs_principle_check, hille_bracket, trace_check

    P = _potential_for(cfg)
    if cfg.bc != "dirichlet":
        raise ConfigError("bs-check compares Dirichlet counts")
    recs = []
    for a in cfg.alphas():
        try:
            r = bs_principle_check(P, float(a), Control(ode_rel_tol=cfg.tol))
            recs.append({"alpha": float(a), "oscillation_count": r.oscillation_count, "bs_count": r.bs_count, "bs_converged": r.bs_converged, "equal": r.equal})
        except SpectraError as exc:
            recs.append({"alpha": float(a), "error": str(exc)})
    h = hille_bracket(P)
    tr = trace_check(P)
    summary = {
        "beta0": h["beta0"],
        "norm_bracket": list(h["norm_bracket"]),
        "zeta_bracket": list(h["zeta_bracket"]),
        "compact": h["compact"],
        "discrete_trace": tr.discrete_trace,
        "moment1": tr.moment1,
        "trace_rel_gap": tr.rel_gap,
    }
    _emit(cfg, recs, ("alpha", "oscillation_count", "bs_count", "bs_converged", "equal"), summary)
    return 0 if all(r.get("equal") for r in recs) else EXIT_FAILURE


def cmd_partition(cfg: SweepConfig) -> int:
    from .partition import build_partition, lemma_bound, phi

    P = _potential_for(cfg)
    lo, hi = cfg.extra["interval"]
    n, a = cfg.extra["n"], cfg.extra["a"]
    part = build_partition(P, (lo, hi), n, a)
    recs = [{"k": k, "left": x, "right": y} for k, (x, y) in enumerate(zip(part.edges[:-1], part.edges[1:]), 1)]
    summary = {"phi": phi(P, part), "bound": lemma_bound(P, (lo, hi), n, a)}
    _emit(cfg, recs, ("k", "left", "right"), summary)
    return 0


def cmd_radial2d(cfg: SweepConfig) -> int:
    from .radial2d import validate_thm62

    F = load_potential(cfg.potential)
    rep = validate_thm62(F, cfg.alphas(), Control(ode_rel_tol=cfg.tol), B.load_constants(cfg.constants))
    recs = [dict(r.__dict__) for r in rep.rows]
    summary = {"q_hat": rep.q_hat, "q_stderr": rep.q_stderr, "all_dominated": rep.all_dominated}
    _emit(cfg, recs, ("alpha", "exact_lower", "exact_upper", "bound", "bound_theorem", "dominated", "dominated_theorem"), summary)
    return 0 if rep.all_dominated else EXIT_FAILURE


COMMANDS = {
    "count": cmd_count,
    "bounds": cmd_bounds,
    "sweep-fit": cmd_sweep_fit,
    "zeta": cmd_zeta,
    "bs-check": cmd_bs_check,
    "partition": cmd_partition,
    "radial2d": cmd_radial2d,
}


def _interval(text: str):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("interval must look like lo,hi") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", required=True, help="JSON file, JSON text or inline Family:k=v,...[@line]")
    common.add_argument("--bc", choices=("dirichlet", "neumann", "line"), default="dirichlet")
    common.add_argument("--alpha-min", type=float, default=1.0)
    common.add_argument("--alpha-max", type=float, default=100.0)
    common.add_argument("--alpha-points", type=int, default=10)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out")
    common.add_argument("--tol", type=float, default=1e-8, help="relative ODE tolerance")
    common.add_argument("--constants", help="constants file (default: the packaged one)")
    common.add_argument("--no-timing", action="store_true", help="write runtime_ms as 0 for byte-stable output")
    ap = argparse.ArgumentParser(prog="halfline-spectra", description="bound-state counts and spectral estimates for 1D Schrödinger operators")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "sweep-fit":
            p.add_argument("--decades", type=float, default=1.0, help="fit window below the largest alpha")
        if name == "partition":
            p.add_argument("--interval", type=_interval, default=(0.0, 1.0))
            p.add_argument("--n", type=int, default=4)
            p.add_argument("--a", type=float, default=1.0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    extra = {}
    for k in ("decades", "interval", "n", "a"):
        if hasattr(args, k):
            extra[k] = getattr(args, k)
    cfg = SweepConfig(
        potential=args.potential,
        bc=args.bc,
        alpha_min=args.alpha_min,
        alpha_max=args.alpha_max,
        alpha_points=args.alpha_points,
        tol=args.tol,
        fmt=args.format,
        out=args.out,
        constants=args.constants,
        timing=not args.no_timing,
        extra=extra,
    )
    try:
        if cfg.constants:
            B.load_constants(cfg.constants)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"halfline-spectra: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpectraError as exc:
        print(f"halfline-spectra: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
