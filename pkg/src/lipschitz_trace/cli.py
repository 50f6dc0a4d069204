"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 a quadrature or
Monte Carlo computation did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .counterexample import COLUMNS, divergence_table
from .fields import (Constant, NecasV, Polynomial, SectorHarmonic, harmonic_polynomials,
                     parse_field, product_sine)
from .geometry import parse_domain, sector_polygon, square
from .kernel_dim import ExcludedAngle, kernel_dim, reflex_count_dim
from .norms import (McConfig, NormReport, boundary_l2, gagliardo_seminorm, l2_norm,
                    weighted_grad_norm, weighted_hess_norm)
from .quadrature import NonConvergence
from .verify import (boundary_flux_identity, grisvard_mixed_identity, harmonic_equivalence_probe,
                     harmonicity_residual, hessian_laplacian_identity, poincare_chain)

__all__ = ["RunConfig", "dispatch", "emit", "main"]

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    tol: float = 1e-8
    mc_samples: int = 100_000
    seed: int = 0
    out: str | None = None
    format: str = "json"
    threads: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.mc_samples < 1000:
            raise UsageError("--mc-samples must be >= 1000")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must fit in 64 bits")
        if self.threads < 0:
            raise UsageError("--threads must be >= 0")


# -- output -----------------------------------------------------------------------
def _clean(obj):
    """Replace non-finite floats by None so any JSON parser accepts the output."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _render(report, fmt: str, cfg: RunConfig) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report["columns"])
        w.writerows(report["rows"])
        return buf.getvalue()
    meta = {"tool_version": __version__, "seed": cfg.seed, "tol": cfg.tol,
            "subcommand": cfg.subcommand}
    return json.dumps(_clean({"metadata": meta, "result": report}), indent=2) + "\n"


def emit(report, fmt: str, path: str | None, cfg: RunConfig) -> None:
    """Write ``report`` as CSV or JSON to ``path`` (stdout when ``None``)."""
    text = _render(report, fmt, cfg)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


# -- argument helpers -----------------------------------------------------------------
def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"not a comma-separated list of numbers: {text!r}") from None


def parse_k_list(text: str) -> list[int]:
    """``1,2,4`` or a dyadic range ``1..4096`` (every power of two in between)."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            a, b = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad k range {text!r}") from None
        if a < 1 or b < a:
            raise UsageError(f"bad k range {text!r}")
        ks, k = [], a
        while k <= b:
            ks.append(k)
            k *= 2
        return ks
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"not a comma-separated list of integers: {text!r}") from None


# -- subcommands ----------------------------------------------------------------------
def _kernel_dim(args, cfg):
    if args.angles is None and args.domain is None:
        raise UsageError("kernel-dim needs --angles or --domain")
    if args.angles is not None:
        angles = _floats(args.angles)
        if args.degrees:
            angles = [math.radians(a) for a in angles]
        spectrum = angles
    else:
        spectrum = parse_domain(args.domain)
    try:
        if args.mode == "reflex":
            rep = reflex_count_dim(spectrum, args.s)
        else:
            rep = kernel_dim(spectrum, args.s)
    except ExcludedAngle as exc:
        emit({"s": args.s, "total_dim": None, "excluded": exc.angle, "error": str(exc)},
             "json", cfg.out, cfg)
        return EXIT_CHECK
    emit(rep.to_dict(), "json", cfg.out, cfg)
    return EXIT_OK


def _counterexample(args, cfg):
    ks = parse_k_list(args.k)
    try:
        rows = divergence_table(ks, tol=min(cfg.tol, 1e-10), interior_tol=args.interior_tol,
                                workers=cfg.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.format == "csv":
        emit({"columns": list(COLUMNS), "rows": [r.csv_fields() for r in rows]}, "csv", cfg.out, cfg)
    else:
        emit({"columns": list(COLUMNS), "interior_tol": args.interior_tol,
              "rows": [r.to_dict() for r in rows]}, "json", cfg.out, cfg)
    if any("nonconvergence" in fl for r in rows for fl in r.flags):
        return EXIT_NUMERIC
    return EXIT_OK if all(r.ok for r in rows) else EXIT_CHECK


_WHAT = ("l2", "wgrad", "whess", "boundary", "gagliardo")


def _norms(args, cfg):
    f = parse_field(args.field)
    p = parse_domain(args.domain)
    rep = NormReport(f.name, args.domain)
    area_kw = {"workers": cfg.threads}
    if args.max_panels is not None:
        if args.max_panels < 1:
            raise UsageError("--max-panels must be positive")
        area_kw["max_cells"] = args.max_panels
    for item in filter(None, (t.strip() for t in args.what.split(";" if ";" in args.what else ","))):
        name, _, opts = item.partition(":")
        if name == "l2":
            rep.add(name, l2_norm(f, p, cfg.tol, **area_kw))
        elif name == "wgrad":
            rep.add(name, weighted_grad_norm(f, p, cfg.tol, **area_kw))
        elif name == "whess":
            rep.add(name, weighted_hess_norm(f, p, cfg.tol, **area_kw))
        elif name == "boundary":
            rep.add(name, boundary_l2(f, p, min(cfg.tol, 1e-10)))
        elif name == "gagliardo":
            key, _, val = opts.partition("=")
            if key != "sigma":
                raise UsageError("gagliardo needs sigma=<value>")
            mc = McConfig(samples=cfg.mc_samples, seed=cfg.seed)
            rep.add(f"gagliardo:sigma={val}", gagliardo_seminorm(f, p, float(val), mc, workers=cfg.threads))
        else:
            raise UsageError(f"unknown norm {name!r}; choose from {', '.join(_WHAT)}")
    emit(rep.to_dict(), "json", cfg.out, cfg)
    return EXIT_OK


def _suite_grisvard(check_tol):
    sq = square(0.5)
    out = []
    for m, n in ((1, 1), (2, 3), (3, 1), (2, 2), (1, 4)):
        f = product_sine(m, n, 0.5)
        out.append((f.name, grisvard_mixed_identity(f, sq, tol=check_tol or 1e-6), False))
        out.append((f.name, hessian_laplacian_identity(f, sq, tol=check_tol or 1e-6), False))
    bad = Polynomial({(1, 1): 1.0, (2, 1): 1.0}, "xy(1+x)")
    out.append((bad.name, grisvard_mixed_identity(bad, sq, tol=1e-6), True))
    return out


def _suite_poincare(check_tol):
    sq = square(0.5)
    out = []
    for m, n in ((1, 1), (1, 2), (2, 2)):
        f = product_sine(m, n, 0.5)
        out += [(f.name, c, False) for c in poincare_chain(f, sq, tol=check_tol or 1e-9)]
    return out


def _suite_flux(check_tol):
    sq = square(0.5)
    fields = (Constant(1.0), Polynomial({(1, 0): 1.0}, "x"), NecasV())
    return [(f.name, boundary_flux_identity(f, sq, tol=check_tol or 1e-6), False) for f in fields]


def _suite_harmonic(check_tol, cfg):
    out = []
    g = np.linspace(0.1, 0.4, 6)
    pts = np.array([[x, y] for x in g for y in g])
    for f in harmonic_polynomials():
        res = harmonicity_residual(f, pts, 1e-3)
        out.append((f.name, {"name": "harmonicity_residual", "value": res,
                             "tolerance": check_tol or 1e-6, "passed": res <= (check_tol or 1e-6)}, False))
    mc = McConfig(samples=cfg.mc_samples, seed=cfg.seed)
    probe = harmonic_equivalence_probe(harmonic_polynomials(), square(0.5), 1e-6, mc)
    out.append(("harmonic polynomials", {"name": "equivalence_spread", **probe.to_dict(),
                                         "passed": math.isfinite(probe.spread)}, False))
    sec = sector_polygon(2.0 / 3.0, n=16)
    probe = harmonic_equivalence_probe([SectorHarmonic(2.0 / 3.0), *harmonic_polynomials()[:2]],
                                       sec, 1e-6, mc)
    out.append(("corner harmonic", {"name": "equivalence_spread", **probe.to_dict(),
                                    "passed": math.isfinite(probe.spread)}, False))
    return out


def _verify(args, cfg):
    suites = {
        "grisvard": lambda: _suite_grisvard(args.check_tol),
        "poincare": lambda: _suite_poincare(args.check_tol),
        "flux": lambda: _suite_flux(args.check_tol),
        "harmonic": lambda: _suite_harmonic(args.check_tol, cfg),
    }
    if args.suite not in suites:
        raise UsageError(f"unknown suite {args.suite!r}")
    results = suites[args.suite]()
    checks, ok = [], True
    for field_name, chk, sentinel in results:
        d = chk if isinstance(chk, dict) else chk.to_dict()
        d = {"field": field_name, "sentinel": sentinel, **d}
        checks.append(d)
        # a sentinel passes when the detector fires, i.e. the check fails
        ok &= (not d["passed"]) if sentinel else bool(d["passed"])
    emit({"suite": args.suite, "passed": ok, "checks": checks}, "json", cfg.out, cfg)
    return EXIT_OK if ok else EXIT_CHECK


# -- parser ------------------------------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="quadrature tolerance")
    common.add_argument("--mc-samples", type=int, default=100_000, help="Monte Carlo samples")
    common.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--threads", type=int, default=0, help="worker threads, 0 = serial")

    ap = _Parser(prog="lipschitz-trace", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", parser_class=_Parser)

    k = sub.add_parser("kernel-dim", parents=[common], help="harmonic kernel dimension of a polygon")
    k.add_argument("--angles", help="comma-separated interior angles")
    k.add_argument("--domain", help="domain spec instead of --angles")
    k.add_argument("--s", type=float, default=0.0)
    k.add_argument("--degrees", action="store_true", help="angles are in degrees")
    k.add_argument("--mode", choices=("formula", "reflex"), default="formula")

    c = sub.add_parser("counterexample", parents=[common], help="sawtooth divergence table")
    c.add_argument("--k", default="1..4096", help="k values: 1,2,4 or a dyadic range 1..4096")
    c.add_argument("--interior-tol", type=float, default=1e-6,
                   help="tolerance of the interior area norms")

    n = sub.add_parser("norms", parents=[common], help="norms of a field on a domain")
    n.add_argument("--field", required=True)
    n.add_argument("--domain", required=True)
    n.add_argument("--what", default="l2", help="l2,wgrad,whess,boundary,gagliardo:sigma=<v>")
    n.add_argument("--max-panels", type=int, default=None,
                   help="cap on triangle cells in the area integrals")

    v = sub.add_parser("verify", parents=[common], help="integral identity checks")
    v.add_argument("--suite", required=True, choices=("grisvard", "flux", "poincare", "harmonic"))
    v.add_argument("--check-tol", type=float, default=None,
                   help="override the pass tolerance of every check")
    return ap


def dispatch(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.subcommand is None:
            raise UsageError("a subcommand is required")
        fmt = args.format or ("csv" if args.subcommand == "counterexample" else "json")
        cfg = RunConfig(args.subcommand, args.tol, args.mc_samples, args.seed, args.out, fmt, args.threads)
        run = {"kernel-dim": _kernel_dim, "counterexample": _counterexample,
               "norms": _norms, "verify": _verify}[args.subcommand]
        return run(args, cfg)
    except UsageError as exc:
        sys.stderr.write(ap.format_usage())
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NonConvergence as exc:
        sys.stderr.write(f"did not converge: {exc}\n")
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch())
