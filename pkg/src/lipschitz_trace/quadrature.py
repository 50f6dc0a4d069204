"""Graded Gauss quadrature on intervals, triangles and polygon boundaries.

Integrands are vectorized callables: ``f(x)`` with ``x`` an array of
abscissae (1D) or of shape ``(N, 2)`` (2D), returning an array of values.

In 1D the error estimate is the last successive difference of the
refinement loop plus the uncertainty of the tail extrapolation.  In 2D it
is the sum over leaf cells of the larger of ``|cell - sum of its four
children|`` and ``|cell - cell under a higher-degree check rule|``.
Both are heuristics, not bounds.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

__all__ = [
    "Quad1D",
    "TriangleRule",
    "IntegralResult",
    "NonConvergence",
    "gauss_legendre",
    "levin_u",
    "integrate_1d",
    "integrate_triangles",
    "integrate_polygon",
    "integrate_boundary",
]

# smallest graded offset, relative to the interval length
_TINY = 1e-300
# nodes per evaluation chunk in 2D; fixed so reductions never depend on workers
_CHUNK = 1 << 18
# share of the estimated error whose cells are split in one adaptive pass
_MARK = 0.5


class NonConvergence(ArithmeticError):
    """The refinement cap was hit before successive values agreed to ``tol``.

    ``result`` carries the best value and its error estimate.
    """

    def __init__(self, message: str, result: "IntegralResult", segment: int | None = None):
        super().__init__(message)
        self.result = result
        self.segment = segment


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    panels_used: int

    def __post_init__(self):
        if not self.error_estimate >= 0.0:
            raise ValueError("error_estimate must be nonnegative")

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class Quad1D:
    """Composite Gauss-Legendre rule graded geometrically toward flagged ends.

    The innermost graded panel stops at ``(b - a) * grading_ratio**levels``
    from a flagged end, so the endpoint itself is never sampled.  With
    ``extrapolate`` the omitted tail is estimated by a Levin u-transform of
    the graded partial sums, which resolves slowly decaying tails such as
    ``1/(x ln^2 x)``.
    """

    base_order: int = 10
    grading_ratio: float = 0.15
    levels: int = 40
    singular_left: bool = False
    singular_right: bool = False
    max_panels: int = 50_000
    extrapolate: bool = True

    def __post_init__(self):
        if self.base_order < 2:
            raise ValueError("base_order must be >= 2")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if not 0.0 < self.grading_ratio < 1.0:
            raise ValueError("grading_ratio must lie in (0, 1)")

    def flagged(self, left: bool = True, right: bool = True) -> "Quad1D":
        return Quad1D(self.base_order, self.grading_ratio, self.levels, left, right,
                      self.max_panels, self.extrapolate)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def levin_u(partial_sums, terms, order: int = 4) -> float:
    """Levin u-transform of the last ``order + 1`` partial sums."""
    s = np.asarray(partial_sums, dtype=float)
    a = np.asarray(terms, dtype=float)
    n0 = len(s) - order - 1
    num = den = 0.0
    for j in range(order + 1):
        n = n0 + j
        omega = (n + 1.0) * a[n]
        c = (-1) ** j * math.comb(order, j) * ((n + 1.0) / (n0 + order + 1.0)) ** (order - 1)
        num += c * s[n] / omega
        den += c / omega
    return num / den


def _graded_edges(a: float, b: float, ratio: float, levels: int) -> np.ndarray:
    """Breakpoints ``a + (b-a) r^j`` for j = levels..0, ascending."""
    h = (b - a) * ratio ** np.arange(levels, -1, -1, dtype=float)
    return a + h


def _max_levels(end: float, length: float, ratio: float) -> int:
    # offsets from `end` must resolve x - end to about 1e-6 relative accuracy
    floor = max(_TINY, 2.0 ** 20 * math.ulp(abs(end)) if end != 0.0 else _TINY)
    return max(1, int(math.log(floor / length) / math.log(ratio)))


def _panel_sums(f, lo: np.ndarray, hi: np.ndarray, order: int) -> np.ndarray:
    x, w = gauss_legendre(order)
    width = hi - lo
    nodes = lo[:, None] + width[:, None] * x[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return (vals @ w) * width


def _tail_correction(contrib: np.ndarray, total: float) -> tuple[float, float]:
    """Levin estimate of the part of a graded integral beyond the last level.

    Returns ``(correction, uncertainty)``; the uncertainty compares orders
    3 and 4 and a one-term shift of the transform.
    """
    tail = contrib[-6:]
    if len(contrib) < 8 or not np.all(np.isfinite(tail)) or np.any(tail == 0.0):
        return 0.0, 0.0
    if not (np.all(tail > 0) or np.all(tail < 0)):
        return 0.0, 0.0
    if abs(tail[-1]) <= 1e-17 * max(abs(total), 1e-300):
        return 0.0, 0.0
    s = np.cumsum(contrib)
    est = levin_u(s, contrib, order=4)
    corr = est - s[-1]
    # an accelerated tail must continue the sequence, not reverse it
    if not np.isfinite(corr) or corr * tail[-1] < 0:
        return 0.0, abs(tail[-1])
    unc = max(abs(est - levin_u(s, contrib, order=3)),
              abs(est - levin_u(s[:-1], contrib[:-1], order=4)))
    return corr, float(unc)


def _tail_sensitivity(contrib: np.ndarray, total: float):
    """Tail correction plus ``|d correction / d contrib_j|`` by finite differences."""
    corr, unc = _tail_correction(contrib, total)
    sens = np.zeros(len(contrib))
    if corr == 0.0:
        return corr, unc, sens
    for j in range(max(0, len(contrib) - 8), len(contrib)):
        h = 1e-6 * abs(contrib[j])
        bumped = contrib.copy()
        bumped[j] += h
        sens[j] = abs(_tail_correction(bumped, total)[0] - corr) / h
    return corr, unc, sens


def _graded_integral(f, a, b, rule: Quad1D, sub: int, levels: int):
    """One pass of the graded composite rule; returns (value, tail uncertainty, panels)."""
    left, right = rule.singular_left, rule.singular_right
    pieces = []
    if left and right:
        m = 0.5 * (a + b)
        pieces = [(a, m, "left"), (m, b, "right")]
    elif left:
        pieces = [(a, b, "left")]
    elif right:
        pieces = [(a, b, "right")]
    else:
        edges = np.linspace(a, b, sub + 1)
        vals = _panel_sums(f, edges[:-1], edges[1:], rule.base_order)
        return math.fsum(vals), 0.0, sub

    total, unc, panels = [], 0.0, 0
    for lo, hi, side in pieces:
        lv = min(levels, _max_levels(lo if side == "left" else hi, hi - lo, rule.grading_ratio))
        if side == "left":
            edges = _graded_edges(lo, hi, rule.grading_ratio, lv)
        else:
            edges = (hi - _graded_edges(0.0, hi - lo, rule.grading_ratio, lv))[::-1]
        # subdivide every graded panel into `sub` equal pieces
        p_lo, p_hi = edges[:-1], edges[1:]
        t = np.linspace(0.0, 1.0, sub + 1)
        s_lo = (p_lo[:, None] + (p_hi - p_lo)[:, None] * t[None, :-1]).ravel()
        s_hi = (p_lo[:, None] + (p_hi - p_lo)[:, None] * t[None, 1:]).ravel()
        vals = _panel_sums(f, s_lo, s_hi, rule.base_order).reshape(len(p_lo), sub).sum(axis=1)
        panels += vals.size * sub
        # contributions ordered from the outermost panel toward the end point
        contrib = vals[::-1] if side == "left" else vals
        piece = math.fsum(contrib)
        if rule.extrapolate:
            corr, du = _tail_correction(contrib, piece)
            piece += corr
            unc += du
        total.append(piece)
    return math.fsum(total), unc, panels


def integrate_1d(f, a: float, b: float, rule: Quad1D | None = None, tol: float = 1e-10,
                 *, max_iter: int = 12) -> IntegralResult:
    """Integrate ``f`` over ``[a, b]`` with graded composite Gauss-Legendre.

    Refinement doubles the subdivision of every panel (and deepens the
    grading when the tail is not extrapolated) until two successive values,
    plus the tail uncertainty, agree to relative ``tol``.

    Raises
    ------
    NonConvergence
        If ``rule.max_panels`` or ``max_iter`` is reached first.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a!r}, b={b!r}")
    rule = rule or Quad1D()
    prev = None
    panels = 0
    for it in range(max_iter):
        sub = 2 ** it
        # the Levin tail loses digits as levels grow, so depth stays fixed with it
        levels = rule.levels if rule.extrapolate else rule.levels + 10 * it
        val, unc, panels = _graded_integral(f, float(a), float(b), rule, sub, levels)
        if not math.isfinite(val):
            raise NonConvergence(f"non-finite integral on [{a}, {b}]",
                                 IntegralResult(val, math.inf, panels))
        if prev is not None:
            diff = abs(val - prev) + unc
            if diff <= tol * abs(val):
                return IntegralResult(val, diff, panels)
        if panels * 2 > rule.max_panels:
            break
        prev = val
    diff = abs(val - prev) + unc if prev is not None else math.inf
    raise NonConvergence(f"integral on [{a}, {b}] did not converge to tol={tol:g}",
                         IntegralResult(val, diff, panels))


# -- triangles ------------------------------------------------------------------
@dataclass(frozen=True)
class TriangleRule:
    """Collapsed (conical-product) Gauss rule on the reference triangle.

    Gauss-Jacobi in the collapsed direction and Gauss-Legendre in the other
    give positive weights and exactness for total degree ``2n - 1``.
    """

    degree: int = 7

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")

    @property
    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        return _collapsed_rule((self.degree + 2) // 2)


@lru_cache(maxsize=None)
def _collapsed_rule(n: int):
    xj, wj = roots_jacobi(n, 1.0, 0.0)
    u, wu = 0.5 * (xj + 1.0), 0.25 * wj
    v, wv = gauss_legendre(n)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    nodes = np.column_stack([uu.ravel(), ((1.0 - uu) * vv).ravel()])
    weights = np.outer(wu, wv).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _grade_cells(tris, grade, levels, ratio):
    """Replace each graded triangle by a geometric refinement toward its corner."""
    plain = tris[grade < 0]
    out = [plain]
    for g in (0, 1, 2):
        for lv in np.unique(levels[grade == g]):
            sel = tris[(grade == g) & (levels == lv)]
            if len(sel) == 0:
                continue
            order = [g, (g + 1) % 3, (g + 2) % 3]
            A, B, C = sel[:, order[0]], sel[:, order[1]], sel[:, order[2]]
            r = ratio ** np.arange(lv + 1, dtype=float)
            Bj = A[:, None] + r[None, :, None] * (B - A)[:, None]
            Cj = A[:, None] + r[None, :, None] * (C - A)[:, None]
            t1 = np.stack([Bj[:, :-1], Cj[:, :-1], Cj[:, 1:]], axis=2)
            t2 = np.stack([Bj[:, :-1], Cj[:, 1:], Bj[:, 1:]], axis=2)
            inner = np.stack([A, Bj[:, -1], Cj[:, -1]], axis=1)
            out += [t1.reshape(-1, 3, 2), t2.reshape(-1, 3, 2), inner]
    return np.concatenate(out, axis=0)


def _subdivide(tris: np.ndarray) -> np.ndarray:
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    kids = np.stack([np.stack([a, ab, ca], 1), np.stack([ab, b, bc], 1),
                     np.stack([ca, bc, c], 1), np.stack([ab, bc, ca], 1)], axis=1)
    return kids.reshape(-1, 3, 2)


def _cells_values(f, cells: np.ndarray, rule: TriangleRule, workers: int) -> np.ndarray:
    """Rule applied to every cell; one value per cell."""
    nodes, weights = rule.nodes_weights
    per = max(1, _CHUNK // len(weights))
    starts = range(0, len(cells), per)

    def work(s):
        c = cells[s:s + per]
        a = c[:, 0]
        e1, e2 = c[:, 1] - a, c[:, 2] - a
        det = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        pts = a[:, None] + nodes[None, :, 0:1] * e1[:, None] + nodes[None, :, 1:2] * e2[:, None]
        vals = np.asarray(f(pts.reshape(-1, 2)), dtype=float).reshape(len(c), len(weights))
        return (vals @ weights) * det

    if len(cells) == 0:
        return np.zeros(0)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return np.concatenate(parts)


def _edge_layers(tris, edge, levels: int, ratio: float):
    """Cut each triangle into strips parallel to its local edge ``edge``.

    Strip ``j`` covers the band ``t in [r^(j+1), r^j]`` of the barycentric
    distance ``t`` to the edge.  The last band ``t < r^levels`` is dropped;
    its share is restored by tail extrapolation over the strip sums.
    Near both ends of the edge each strip is cut into pieces of doubling
    length starting at its own height, so features at the edge end points
    (where other sides meet) are seen by the quadrature nodes.
    Returns ``(cells, layer_index)``.
    """
    out, tags = [], []
    t = ratio ** np.arange(levels + 1, dtype=float)
    for e in (0, 1, 2):
        sel = tris[edge == e]
        if len(sel) == 0:
            continue
        A, B, C = sel[:, e], sel[:, (e + 1) % 3], sel[:, (e + 2) % 3]
        U = A[:, None] + t[None, :, None] * (C - A)[:, None]
        V = B[:, None] + t[None, :, None] * (C - B)[:, None]
        out.append(np.stack([U[:, 1], V[:, 1], C], axis=1))
        tags.append(np.zeros(len(sel), dtype=int))
        for j in range(1, levels):
            g = t[j] * 2.0 ** np.arange(0, 64)
            g = g[g < 0.5]
            sb = np.unique(np.concatenate([[0.0, 0.5, 1.0], g, 1.0 - g]))
            lo = U[:, j + 1, None] + sb[None, :, None] * (V[:, j + 1] - U[:, j + 1])[:, None]
            hi = U[:, j, None] + sb[None, :, None] * (V[:, j] - U[:, j])[:, None]
            t1 = np.stack([lo[:, :-1], lo[:, 1:], hi[:, 1:]], axis=2)
            t2 = np.stack([lo[:, :-1], hi[:, 1:], hi[:, :-1]], axis=2)
            out += [t1.reshape(-1, 3, 2), t2.reshape(-1, 3, 2)]
            tags += [np.full(t1.shape[0] * t1.shape[1], j)] * 2
    return np.concatenate(out), np.concatenate(tags)


def integrate_triangles(f, tris, grade=None, levels=None, rule: TriangleRule | None = None,
                        tol: float = 1e-8, *, ratio: float = 0.5, edge_grade=None,
                        edge_levels: int = 40, edge_ratio: float = 0.15,
                        max_cells: int = 16_000_000, max_iter: int = 400,
                        workers: int = 0, check_degree: int = 19) -> IntegralResult:
    """Integrate over a union of triangles, grading flagged corners and edges.

    ``grade[t]`` names the local vertex of triangle ``t`` to grade toward
    (or -1) and ``levels[t]`` the number of geometric levels.
    ``edge_grade[t]`` names a local edge ``(e, e+1)`` along which the
    integrand is singular (or -1); such triangles are cut into
    ``edge_levels`` strips and the strip sums are tail-extrapolated.

    Refinement is local: every leaf cell is compared with the sum over its
    four children and with a ``check_degree`` rule whose nodes lie closer
    to the vertices; the larger difference is its error indicator.  Each pass
    splits the cells with the largest indicators that together carry half
    of the estimated error, until the summed indicators fall below
    ``tol * |value|``.  Kinks of the integrand (e.g. ridges of a distance
    function) are resolved without refining smooth regions.
    """
    tris = np.asarray(tris, dtype=float).reshape(-1, 3, 2)
    n = len(tris)
    grade = np.full(n, -1) if grade is None else np.asarray(grade)
    levels = np.zeros(n, dtype=int) if levels is None else np.asarray(levels)
    edge_grade = np.full(n, -1) if edge_grade is None else np.asarray(edge_grade)
    rule = rule or TriangleRule()
    plain = edge_grade < 0
    cells = _grade_cells(tris[plain], grade[plain], levels[plain], ratio)
    tags = np.full(len(cells), -1)
    if not plain.all():
        lc, lt = _edge_layers(tris[~plain], edge_grade[~plain], edge_levels, edge_ratio)
        cells = np.concatenate([cells, lc])
        tags = np.concatenate([tags, lt])
    vals = _cells_values(f, cells, rule, workers)
    check = TriangleRule(check_degree)
    rvals = _cells_values(f, cells, check, workers)
    used = len(cells)

    def children(c):
        kids = _subdivide(c)
        return kids, _cells_values(f, kids, rule, workers).reshape(-1, 4)

    kids, kv = children(cells)
    used += len(kids)
    total = err = math.inf
    for _ in range(max_iter):
        ksum = kv.sum(axis=1)
        # a kink near a vertex can hide from parent and children alike; the check rule sees it
        ind = np.maximum(np.abs(ksum - vals), np.abs(rvals - vals))
        striped = tags >= 0
        has_strips = bool(striped.any())
        total = float(np.sum(ksum))
        tail_unc = corr = 0.0
        if has_strips:
            strips = np.bincount(tags[striped], weights=ksum[striped], minlength=edge_levels)
            corr, tail_unc, sens = _tail_sensitivity(strips, total)
            # errors in the last strips propagate through the extrapolated tail
            ind = ind.copy()
            ind[striped] *= 1.0 + sens[tags[striped]]
        err = float(np.sum(ind)) + tail_unc
        if not (math.isfinite(total + corr) and math.isfinite(err)):
            raise NonConvergence("non-finite area integral", IntegralResult(total, math.inf, used))
        if err <= tol * abs(total + corr):
            return IntegralResult(math.fsum(ksum) + corr, err, used)
        # bulk marking: split the loudest cells carrying half the estimated error
        order = np.argsort(-ind, kind="stable")
        cum = np.cumsum(ind[order])
        nmark = int(np.searchsorted(cum, _MARK * cum[-1])) + 1
        mark = np.zeros(len(cells), dtype=bool)
        mark[order[:nmark]] = True
        if used + 16 * nmark > max_cells:
            break
        new_cells = kids.reshape(-1, 4, 3, 2)[mark].reshape(-1, 3, 2)
        new_vals = kv[mark].ravel()
        new_tags = np.repeat(tags[mark], 4)
        nk, nkv = children(new_cells)
        new_rvals = _cells_values(f, new_cells, check, workers)
        used += len(nk) + len(new_cells)
        keep = ~mark
        cells = np.concatenate([cells[keep], new_cells])
        vals = np.concatenate([vals[keep], new_vals])
        rvals = np.concatenate([rvals[keep], new_rvals])
        tags = np.concatenate([tags[keep], new_tags])
        kids = np.concatenate([kids.reshape(-1, 4, 3, 2)[keep], nk.reshape(-1, 4, 3, 2)]).reshape(-1, 3, 2)
        kv = np.concatenate([kv[keep], nkv])
    raise NonConvergence(f"area integral did not converge to tol={tol:g}",
                         IntegralResult(total, err, used))


def integrate_polygon(f, p, rule: TriangleRule | None = None, corner_grading=None,
                      tol: float = 1e-8, *, singular_edges=(), **kwargs) -> IntegralResult:
    """Integrate ``f`` over a polygon (or sawtooth domain).

    The domain is triangulated; triangles touching a flagged corner are
    graded geometrically toward it with ``corner_grading`` levels (an int or
    one entry per vertex).  ``singular_edges`` lists polygon edges
    ``(i, i+1)`` along which ``f`` is singular; their end points are graded
    as corners too.
    """
    singular_edges = sorted({int(e) % len(p.vertices) for e in singular_edges})
    if singular_edges:
        n = len(p.vertices)
        flags = list(p.corner_flags)
        for e in singular_edges:
            flags[e] = flags[(e + 1) % n] = True
        p = p.with_corner_flags(flags)
    cells = p.cells(corner_grading) if corner_grading is not None else p.cells()
    tris, grade, lv = cells
    edge_grade = None
    if singular_edges:
        edge_grade = _match_edges(tris, p.vertices, singular_edges)
        grade = np.where(edge_grade >= 0, -1, grade)
    return integrate_triangles(f, tris, grade, lv, rule, tol, edge_grade=edge_grade, **kwargs)


def _match_edges(tris, vertices, edges):
    """Local index of the triangle edge lying on one of the polygon ``edges``."""
    n = len(vertices)
    out = np.full(len(tris), -1)
    for e in edges:
        a, b = vertices[e], vertices[(e + 1) % n]
        d = b - a
        L2 = float(d @ d)
        for t, tri in enumerate(tris):
            # a triangle edge lies on the polygon edge iff both ends are collinear with it
            rel = tri - a
            on = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]) <= 1e-13 * L2
            s = (rel @ d) / L2
            on &= (s >= -1e-13) & (s <= 1 + 1e-13)
            for j in range(3):
                if on[j] and on[(j + 1) % 3]:
                    out[t] = j
    return out


def integrate_boundary(f, segments, rule: Quad1D | None = None, tol: float = 1e-10) -> IntegralResult:
    """Sum of arclength integrals of ``f`` over ``segments``."""
    rule = rule or Quad1D()
    vals, errs, panels = [], [], 0
    for seg in segments:
        def g(s, seg=seg):
            return f(seg.point_at(s))
        try:
            r = integrate_1d(g, 0.0, seg.length, rule, tol)
        except NonConvergence as exc:
            raise NonConvergence(f"segment {seg.index}: {exc}", exc.result, seg.index) from exc
        vals.append(r.value)
        errs.append(r.error_estimate)
        panels += r.panels_used
    return IntegralResult(math.fsum(vals), math.fsum(errs), panels)
