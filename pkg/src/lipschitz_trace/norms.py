"""Norm functionals over polygonal domains.

Plain and distance-weighted L2 norms of a field and its derivatives, the
Gagliardo seminorm by stratified Monte Carlo, boundary trace norms and
Hardy ratios.  Every result carries an error estimate (quadrature) or a
standard error (Monte Carlo).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .fields import ScalarField
from .quadrature import IntegralResult, Quad1D, integrate_1d, integrate_polygon, NonConvergence

__all__ = [
    "NormValue",
    "McConfig",
    "GagliardoEstimate",
    "NormReport",
    "l2_norm",
    "weighted_grad_norm",
    "weighted_hess_norm",
    "gagliardo_seminorm",
    "boundary_l2",
    "tangential_deriv_l2",
    "hardy_ratio",
    "grad_l2_norm",
    "prepare_domain",
    "area_integral",
    "boundary_integral",
]

# how close (relative to the domain size) a vertex must be to a singular point or line
_SNAP = 1e-12


@dataclass(frozen=True)
class NormValue:
    """A norm and the error estimate propagated from its squared integral."""

    value: float
    error_estimate: float
    cells: int = 0

    def __float__(self) -> float:
        return self.value

    @classmethod
    def from_integral(cls, r: IntegralResult) -> "NormValue":
        sq = max(r.value, 0.0)
        val = math.sqrt(sq)
        # d sqrt(I) = dI / (2 sqrt I); cap by sqrt(dI) when I is tiny
        err = min(r.error_estimate / (2.0 * val), math.sqrt(r.error_estimate)) if val > 0 else math.sqrt(r.error_estimate)
        return cls(val, float(err), r.panels_used)


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.

    ``stratification`` is the number of log-spaced ``|x - y|`` shells and
    ``corner_levels`` the number of dyadic annuli sampled around each
    flagged corner.
    """

    samples: int = 100_000
    seed: int = 0
    stratification: int = 8
    corner_levels: int = 8

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("samples must be >= 1000")
        if self.stratification < 1:
            raise ValueError("need at least one shell")
        if self.corner_levels < 0:
            raise ValueError("corner_levels must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class GagliardoEstimate:
    """Seminorm ``value`` (square root of the double integral) with its standard error."""

    value: float
    stderr: float
    sigma: float
    double_integral: float
    double_integral_stderr: float
    samples: int

    def __float__(self) -> float:
        return self.value


@dataclass
class NormReport:
    """Named norm entries, each a dict with ``value`` and ``error`` (or ``stderr``)."""

    field: str
    domain: str
    entries: dict = field(default_factory=dict)

    def add(self, name: str, result) -> None:
        if isinstance(result, GagliardoEstimate):
            self.entries[name] = {"value": result.value, "stderr": result.stderr,
                                  "sigma": result.sigma, "samples": result.samples}
        else:
            self.entries[name] = {"value": result.value, "error": result.error_estimate}

    def to_dict(self) -> dict:
        return asdict(self)


# -- domain preparation -------------------------------------------------------
def _on_line(pts, line, scale):
    nx, ny, c = line
    return np.abs(pts[..., 0] * nx + pts[..., 1] * ny - c) <= _SNAP * scale * math.hypot(nx, ny)


def prepare_domain(p, f: ScalarField):
    """Flag corners and edges of ``p`` where ``f`` is singular.

    Returns ``(domain, singular_edges)``.  Vertices at a singular point or
    on a singular line are flagged for corner grading; edges lying on a
    singular line are returned for edge grading.  The sawtooth domain keeps
    its own cells and flags.
    """
    if not hasattr(p, "with_corner_flags"):
        return p, ()
    v = p.vertices
    scale = max(1.0, p.diameter)
    flags = np.array(p.corner_flags, dtype=bool)
    for pt in f.singular_points:
        flags |= np.hypot(v[:, 0] - pt[0], v[:, 1] - pt[1]) <= _SNAP * scale
    edges = []
    w = np.roll(v, -1, axis=0)
    for line in f.singular_lines:
        on = _on_line(v, line, scale)
        flags |= on
        edges += [i for i in range(len(v)) if on[i] and _on_line(w[i], line, scale)]
    if flags.tolist() != list(p.corner_flags):
        p = p.with_corner_flags(flags.tolist())
    return p, tuple(sorted(set(edges)))


def area_integral(integrand, p, f: ScalarField, tol: float = 1e-8, **kw) -> IntegralResult:
    """``int_p integrand`` with grading adapted to the singularities of ``f``."""
    dom, edges = prepare_domain(p, f)
    return integrate_polygon(integrand, dom, tol=tol, singular_edges=edges, **kw)


_area = area_integral


# -- area norms -----------------------------------------------------------------
def l2_norm(f: ScalarField, p, tol: float = 1e-8, **kw) -> NormValue:
    """``||f||_{L2(p)}``."""
    def g(q):
        return f.value(q) ** 2
    return NormValue.from_integral(_area(g, p, f, tol, **kw))


def weighted_grad_norm(f: ScalarField, p, tol: float = 1e-8, **kw) -> NormValue:
    """``||sqrt(rho) grad f||_{L2(p)}`` with ``rho`` the distance to the boundary."""
    def g(q):
        gr = f.gradient(q)
        return p.distance(q) * np.einsum("...i,...i->...", gr, gr)
    return NormValue.from_integral(_area(g, p, f, tol, **kw))


def weighted_hess_norm(f: ScalarField, p, tol: float = 1e-8, **kw) -> NormValue:
    """``||sqrt(rho) D^2 f||_{L2(p)}`` with the Frobenius norm of the Hessian."""
    def g(q):
        h = f.hessian(q)
        return p.distance(q) * np.einsum("...ij,...ij->...", h, h)
    return NormValue.from_integral(_area(g, p, f, tol, **kw))


def grad_l2_norm(f: ScalarField, p, tol: float = 1e-8, **kw) -> NormValue:
    """``||grad f||_{L2(p)}``."""
    def g(q):
        gr = f.gradient(q)
        return np.einsum("...i,...i->...", gr, gr)
    return NormValue.from_integral(_area(g, p, f, tol, **kw))


# -- boundary norms -------------------------------------------------------------
def _end_flags(f: ScalarField, seg, scale: float) -> tuple[bool, bool]:
    ends = np.stack([seg.start, seg.end])
    sing = ~np.asarray(f.valid(ends), dtype=bool)
    for pt in f.singular_points:
        sing |= np.hypot(ends[:, 0] - pt[0], ends[:, 1] - pt[1]) <= _SNAP * scale
    for line in f.singular_lines:
        sing |= _on_line(ends, line, scale)
    return bool(sing[0]), bool(sing[1])


def _segment_integral(g, segments, f, tol) -> IntegralResult:
    vals, errs, panels = [], [], 0
    scale = max([1.0] + [float(np.max(np.abs(s.start))) for s in segments])
    for seg in segments:
        left, right = _end_flags(f, seg, scale)
        rule = Quad1D(singular_left=left, singular_right=right)

        def h(s, seg=seg):
            return g(seg.point_at(s), seg)
        try:
            r = integrate_1d(h, 0.0, seg.length, rule, tol)
        except NonConvergence as exc:
            raise NonConvergence(f"segment {seg.index}: {exc}", exc.result, seg.index) from exc
        vals.append(r.value)
        errs.append(r.error_estimate)
        panels += r.panels_used
    return IntegralResult(math.fsum(vals), math.fsum(errs), panels)


def boundary_integral(g, f: ScalarField, segments: Sequence, tol: float = 1e-10) -> IntegralResult:
    """Arclength integral of ``g(q, seg)`` over ``segments``, graded where ``f`` is singular."""
    return _segment_integral(g, segments, f, tol)


def boundary_l2(f: ScalarField, p, tol: float = 1e-10) -> NormValue:
    """``||f||_{L2(boundary of p)}`` in arclength."""
    return NormValue.from_integral(_segment_integral(lambda q, seg: f.value(q) ** 2, p.segments, f, tol))


def tangential_deriv_l2(f: ScalarField, segments: Sequence, tol: float = 1e-10) -> NormValue:
    """``||d_tau f||_{L2}`` over ``segments``, with ``d_tau f = grad f . t``."""
    def g(q, seg):
        return (f.gradient(q) @ seg.tangent) ** 2
    return NormValue.from_integral(_segment_integral(g, segments, f, tol))


# -- Gagliardo seminorm -----------------------------------------------------------
def _rng(seed: int, *key: int) -> np.random.Generator:
    # counter-based stream per stratum: the same draws whatever the evaluation order
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *key])))


def _corner_points(p, f: ScalarField):
    dom, _ = prepare_domain(p, f)
    flags = np.asarray(dom.corner_flags, dtype=bool)
    return np.asarray(dom.vertices)[flags]


def _strata(p, corners: np.ndarray, levels: int):
    """X-strata: dyadic annuli around each corner plus the rest of the bounding box.

    Each stratum is ``(kind, center, r_in, r_out, scale)``; ``scale`` is the
    largest ``|x - y|`` resolved separately from the near-diagonal shell.
    """
    xmin, ymin, xmax, ymax = p.bounds
    diam = p.diameter
    if len(corners):
        sep = [np.hypot(*(a - b)) for i, a in enumerate(corners) for b in corners[i + 1:]]
        R = min([0.25 * diam] + [0.5 * s for s in sep])
    else:
        R = 0.0
    out = [("rest", None, R, None, diam)]
    for c in corners:
        for j in range(levels):
            r_out = R * 0.5 ** j
            out.append(("annulus", c, 0.5 * r_out, r_out, min(diam, 4.0 * r_out)))
    return out, R


def _sample_x(rng, stratum, p, n, corners, R):
    kind, c, r_in, r_out, _ = stratum
    if kind == "rest":
        xmin, ymin, xmax, ymax = p.bounds
        x = np.column_stack([rng.uniform(xmin, xmax, n), rng.uniform(ymin, ymax, n)])
        vol = (xmax - xmin) * (ymax - ymin)
        keep = np.ones(n, dtype=bool)
        for cc in corners:
            keep &= np.hypot(x[:, 0] - cc[0], x[:, 1] - cc[1]) >= R
        return x, vol, keep
    # uniform in the annulus by inverse CDF of r^2
    u = rng.uniform(0.0, 1.0, n)
    r = np.sqrt(r_in ** 2 + u * (r_out ** 2 - r_in ** 2))
    th = rng.uniform(0.0, 2.0 * math.pi, n)
    x = c + np.column_stack([r * np.cos(th), r * np.sin(th)])
    vol = math.pi * (r_out ** 2 - r_in ** 2)
    return x, vol, np.ones(n, dtype=bool)


def _shell_radius(rng, lo: float, hi: float, sigma: float, n: int):
    """Draw ``r`` on ``[lo, hi]`` with density proportional to ``r^(1 - 2 sigma)``.

    Returns ``(r, mass)`` where ``mass = int_lo^hi r^(1 - 2 sigma) dr``.
    """
    k = 2.0 - 2.0 * sigma
    a, b = lo ** k, hi ** k
    u = rng.uniform(0.0, 1.0, n)
    r = (a + u * (b - a)) ** (1.0 / k)
    return r, (b - a) / k


def gagliardo_seminorm(f: ScalarField, p, sigma: float, cfg: McConfig | None = None,
                       *, workers: int = 0) -> GagliardoEstimate:
    """Stratified Monte Carlo for ``int int |f(x)-f(y)|^2 / |x-y|^(2+2 sigma)``.

    The first point ``x`` is stratified into dyadic annuli around the
    flagged (or singular) corners and the rest of the domain; the offset
    ``y - x`` is stratified into log-spaced shells in ``|x - y|``, each
    sampled with density ``r^(1-2 sigma)`` so the estimator stays bounded
    for Lipschitz ``f``.  Pairs with a point outside ``p`` or inside the
    innermost corner annulus contribute zero.  The reported ``value`` is the
    square root of the double integral.
    """
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    cfg = cfg or McConfig()
    corners = _corner_points(p, f)
    strata, R = _strata(p, corners, cfg.corner_levels)
    core = R * 0.5 ** cfg.corner_levels
    nshell = cfg.stratification
    per = max(2, cfg.samples // (len(strata) * nshell))

    def excluded(q):
        bad = ~np.asarray(p.contains(q), dtype=bool)
        for cc in corners:
            bad |= np.hypot(q[:, 0] - cc[0], q[:, 1] - cc[1]) < core
        return bad

    def shell(si, k, st, lo, hi):
        rng = _rng(cfg.seed, si, k)
        x, vol, keep = _sample_x(rng, st, p, per, corners, R)
        r, mass = _shell_radius(rng, lo, hi, sigma, per)
        th = rng.uniform(0.0, 2.0 * math.pi, per)
        y = x + np.column_stack([r * np.cos(th), r * np.sin(th)])
        ok = keep & ~excluded(x) & ~excluded(y)
        est = np.zeros(per)
        if ok.any():
            d = f.value(x[ok]) - f.value(y[ok])
            est[ok] = d * d / (r[ok] * r[ok])
        est *= vol * mass * 2.0 * math.pi
        return float(np.mean(est)), float(np.var(est, ddof=1)) / per

    jobs = []
    far = 2.0 * p.diameter
    for si, st in enumerate(strata):
        scale = st[4]
        edges = scale * 0.5 ** np.arange(nshell, dtype=float)
        # innermost shell reaches down to |x - y| = 0; the last one covers offsets past `scale`
        lows = np.append(edges[1:], 0.0)
        jobs += [(si, k, st, lows[k], edges[k]) for k in range(nshell)]
        if far > scale:
            jobs.append((si, nshell, st, scale, far))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda j: shell(*j), jobs))
    else:
        parts = [shell(*j) for j in jobs]
    means = [m for m, _ in parts]
    variances = [v for _, v in parts]
    total = math.fsum(means)
    se = math.sqrt(math.fsum(variances))
    val = math.sqrt(max(total, 0.0))
    se_val = se / (2.0 * val) if val > 0 else math.sqrt(se)
    nsamp = per * len(means)
    return GagliardoEstimate(val, se_val if total > 0 else 0.0, float(sigma), total, se, nsamp)


# -- Hardy ratio --------------------------------------------------------------------
def hardy_ratio(f: ScalarField, p, s: float, tol: float = 1e-8, cfg: McConfig | None = None) -> float:
    """``||f / rho^s||_{L2} / |f|_{H^s}`` for ``f`` supported inside ``p``.

    ``s = 1`` uses ``|f|_{H^1} = ||grad f||``; ``0 < s < 1`` the Gagliardo
    seminorm.  ``s = 1/2`` is excluded.

    Raises
    ------
    ZeroDivisionError
        If the seminorm of ``f`` vanishes.
    """
    if not (0.0 < s <= 1.0) or s == 0.5:
        raise ValueError("s must lie in (0, 1] and differ from 1/2")
    if hasattr(f, "support_inside") and not f.support_inside(p):
        raise ValueError("field support must lie strictly inside the domain")

    def g(q):
        rho = p.distance(q)
        v = f.value(q)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(v != 0.0, v * v / rho ** (2.0 * s), 0.0)
        return out

    num = NormValue.from_integral(_area(g, p, f, tol))
    if s == 1.0:
        den = grad_l2_norm(f, p, tol).value
    else:
        den = gagliardo_seminorm(f, p, s, cfg).value
    if den == 0.0:
        raise ZeroDivisionError("seminorm of the field is zero")
    return num.value / den
