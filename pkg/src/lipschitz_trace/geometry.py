"""Planar polygonal domains and the sawtooth family.

Points are handled as ``(..., 2)`` float arrays throughout so that every
query (containment, distance to the boundary) is vectorized over
quadrature nodes.  A single point may be passed as a pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "Point2",
    "Polygon",
    "PolygonError",
    "AngleSpectrum",
    "Segment",
    "SawtoothDomain",
    "lambda_profile",
    "make_sawtooth",
    "interior_angles",
    "distance_to_boundary",
    "contains",
    "triangulate",
    "boundary_segments",
    "shoelace_area",
    "square",
    "rectangle",
    "l_shape",
    "sector_polygon",
    "polygon_from_json",
    "polygon_to_json",
    "parse_domain",
]

# relative tolerance used for collinearity / straight-angle detection
_ANGLE_TOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class PolygonError(ValueError):
    """Raised when a vertex loop violates a polygon invariant."""


@dataclass(frozen=True)
class Segment:
    """Oriented boundary segment with its arclength frame."""

    index: int
    start: np.ndarray
    end: np.ndarray
    length: float
    tangent: np.ndarray
    normal: np.ndarray

    def point_at(self, s):
        """Point at arclength ``s`` (scalar or array) from ``start``."""
        s = np.asarray(s, dtype=float)
        return self.start + s[..., None] * self.tangent

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.start + self.end)


@dataclass(frozen=True)
class AngleSpectrum:
    """Sorted interior angles ``omegas`` and their exponents ``alphas = pi/omega``."""

    omegas: tuple[float, ...]
    alphas: tuple[float, ...]

    @classmethod
    def from_angles(cls, angles: Sequence[float]) -> "AngleSpectrum":
        omegas = tuple(sorted(float(a) for a in angles))
        if not omegas:
            raise ValueError("angle spectrum must be nonempty")
        for w in omegas:
            if not 0.0 < w < 2.0 * math.pi:
                raise ValueError(f"interior angle {w!r} outside (0, 2*pi)")
        return cls(omegas, tuple(math.pi / w for w in omegas))

    @property
    def largest(self) -> float:
        return self.omegas[-1]

    @property
    def reflex_count(self) -> int:
        return sum(1 for w in self.omegas if w > math.pi)

    @property
    def is_convex(self) -> bool:
        return self.reflex_count == 0

    def __len__(self) -> int:
        return len(self.omegas)


def shoelace_area(vertices) -> float:
    """Signed area of a closed vertex loop (positive when counter-clockwise)."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * math.fsum(x * yn - xn * y)


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed-segment intersection test (touching counts)."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and on_seg(p1, p2, q1)) or (o2 == 0 and on_seg(p1, p2, q2))
            or (o3 == 0 and on_seg(q1, q2, p1)) or (o4 == 0 and on_seg(q1, q2, p2)))


def _first_self_intersection(v: np.ndarray):
    n = len(v)
    a, b = v, np.roll(v, -1, axis=0)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    for i in range(n):
        # bounding-box prefilter, then the exact test on survivors
        cand = np.nonzero(np.all(lo <= hi[i], axis=1) & np.all(hi >= lo[i], axis=1))[0]
        for j in cand:
            if j <= i:
                continue
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex by construction
            if _segments_intersect(a[i], b[i], a[j], b[j]):
                return i, int(j)
    return None


class Polygon:
    """Immutable simple polygon with counter-clockwise vertex order.

    Parameters
    ----------
    vertices : array_like, shape (n, 2)
        Vertex loop, counter-clockwise, without repeating the first vertex.
    corner_flags : sequence of bool, optional
        Marks vertices toward which area quadrature is graded.
    check_simple : bool
        Run the O(n^2) self-intersection check.  Constructors that are
        simple by design (the sawtooth family) switch it off.
    """

    def __init__(self, vertices, corner_flags=None, *, check_simple: bool = True):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise PolygonError("vertices must have shape (n, 2)")
        n = len(v)
        if n < 3:
            raise PolygonError(f"polygon needs at least 3 vertices, got {n}")
        if not np.all(np.isfinite(v)):
            raise PolygonError("vertex coordinates must be finite")
        e_out = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(e_out[:, 0], e_out[:, 1])
        if np.any(lengths == 0.0):
            i = int(np.argmin(lengths))
            raise PolygonError(f"repeated vertex at index {i}")
        area = shoelace_area(v)
        if not area > 0.0:
            raise PolygonError("vertices must be in counter-clockwise order (signed area > 0)")
        e_in = np.roll(e_out, 1, axis=0)
        cr = _cross(e_in, e_out)
        dt = np.einsum("ij,ij->i", e_in, e_out)
        scale = np.roll(lengths, 1) * lengths
        for i in range(n):
            if abs(cr[i]) <= _ANGLE_TOL * scale[i]:
                raise PolygonError(f"three consecutive collinear vertices at index {i}")
        if check_simple:
            hit = _first_self_intersection(v)
            if hit is not None:
                raise PolygonError(f"edges {hit[0]} and {hit[1]} intersect (polygon not simple)")

        if corner_flags is None:
            flags = (False,) * n
        else:
            flags = tuple(bool(f) for f in corner_flags)
            if len(flags) != n:
                raise PolygonError("corner_flags must have one entry per vertex")

        v.setflags(write=False)
        self._vertices = v
        self._area = area
        self._edge_lengths = lengths
        self._edge_lengths.setflags(write=False)
        # interior angle = pi - signed turning angle
        angles = math.pi - np.arctan2(cr, dt)
        angles.setflags(write=False)
        self._angles = angles
        self._flags = flags

    # -- basic data ---------------------------------------------------------
    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def corner_flags(self) -> tuple[bool, ...]:
        return self._flags

    @property
    def angles(self) -> np.ndarray:
        """Interior angle at each vertex, in vertex order."""
        return self._angles

    @property
    def area(self) -> float:
        return self._area

    @property
    def perimeter(self) -> float:
        return math.fsum(self._edge_lengths)

    @property
    def edges(self) -> np.ndarray:
        """Edge endpoints, shape (n, 2, 2); edge i runs from vertex i to i+1."""
        v = self._vertices
        return np.stack([v, np.roll(v, -1, axis=0)], axis=1)

    @property
    def polygon(self) -> "Polygon":
        return self

    @cached_property
    def centroid(self) -> np.ndarray:
        v = self._vertices
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        c = x * yn - xn * y
        cx = math.fsum((x + xn) * c) / (6.0 * self._area)
        cy = math.fsum((y + yn) * c) / (6.0 * self._area)
        return np.array([cx, cy])

    @property
    def diameter(self) -> float:
        v = self._vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", d, d))))

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        lo, hi = self._vertices.min(axis=0), self._vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def __len__(self) -> int:
        return len(self._vertices)

    def __repr__(self) -> str:
        return f"Polygon(n={len(self)}, area={self._area:.6g})"

    def with_corner_flags(self, flags) -> "Polygon":
        """Copy with new grading flags (``flags`` may be a predicate on angles)."""
        if callable(flags):
            flags = [bool(flags(w)) for w in self._angles]
        return Polygon(self._vertices, flags, check_simple=False)

    # -- derived ------------------------------------------------------------
    @cached_property
    def spectrum(self) -> AngleSpectrum:
        return AngleSpectrum.from_angles(self._angles)

    @cached_property
    def segments(self) -> tuple[Segment, ...]:
        v = self._vertices
        w = np.roll(v, -1, axis=0)
        out = []
        for i in range(len(v)):
            length = float(self._edge_lengths[i])
            t = (w[i] - v[i]) / length
            out.append(Segment(i, v[i].copy(), w[i].copy(), length, t, np.array([t[1], -t[0]])))
        return tuple(out)

    @cached_property
    def triangles(self) -> tuple[np.ndarray, np.ndarray]:
        """Ear-clipping triangulation as ``(coords (T,3,2), vertex ids (T,3))``."""
        ids = _earclip(self._vertices, np.asarray(self._flags, dtype=bool))
        return self._vertices[ids], ids

    def cells(self, levels=None):
        """Quadrature cells: triangles plus the vertex each one is graded toward.

        Returns ``(tris, grade, grade_levels)`` where ``grade[t]`` is the local
        vertex (0..2) of triangle ``t`` sitting on a flagged corner, or -1.
        """
        tris, ids = self.triangles
        n = len(self)
        if levels is None:
            levels = 40
        lv = np.broadcast_to(np.asarray(levels, dtype=int), (n,))
        flags = np.asarray(self._flags, dtype=bool)
        return _split_flagged(tris, flags[ids], lv[ids])

    def contains(self, points) -> np.ndarray:
        """Strict interior test by ray-crossing parity (boundary points are outside)."""
        q = np.asarray(points, dtype=float)
        shape = q.shape[:-1]
        q = q.reshape(-1, 2)
        on_boundary = self._raw_distance(q) <= 1e-14 * max(1.0, self.diameter)
        return (self._parity(q) & ~on_boundary).reshape(shape)

    def _parity(self, q: np.ndarray) -> np.ndarray:
        inside = np.zeros(len(q), dtype=bool)
        v = self._vertices
        w = np.roll(v, -1, axis=0)
        for a, b in zip(v, w):
            cond = (a[1] > q[:, 1]) != (b[1] > q[:, 1])
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = a[0] + (q[:, 1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            inside ^= cond & (q[:, 0] < xint)
        return inside

    def _raw_distance(self, q: np.ndarray) -> np.ndarray:
        v = self._vertices
        e = np.roll(v, -1, axis=0) - v
        ee = np.einsum("ij,ij->i", e, e)
        out = np.empty(len(q))
        chunk = max(1, 4_000_000 // len(v))
        for s in range(0, len(q), chunk):
            qq = q[s:s + chunk]
            d = qq[:, None, :] - v[None, :, :]
            t = np.clip(np.einsum("pij,ij->pi", d, e) / ee, 0.0, 1.0)
            r = d - t[..., None] * e
            out[s:s + chunk] = np.sqrt(np.min(np.einsum("pij,pij->pi", r, r), axis=1))
        return out

    def distance(self, points, *, inside_only: bool = True) -> np.ndarray:
        """Euclidean distance to the boundary; 0 outside when ``inside_only``."""
        q = np.asarray(points, dtype=float)
        shape = q.shape[:-1]
        qf = q.reshape(-1, 2)
        d = self._raw_distance(qf)
        if inside_only:
            # parity alone: points a hair inside still get their tiny distance
            d = np.where(self._parity(qf), d, 0.0)
        return d.reshape(shape)


def _in_triangle(p, a, b, c):
    """Closed point-in-triangle test for a counter-clockwise triangle (vectorized in p)."""
    eps = 0.0
    return ((_cross(b - a, p - a) >= -eps) & (_cross(c - b, p - b) >= -eps)
            & (_cross(a - c, p - c) >= -eps))


def _earclip(v: np.ndarray, flagged=None) -> np.ndarray:
    n = len(v)
    if n == 3:
        return np.array([[0, 1, 2]])
    prev = [(i - 1) % n for i in range(n)]
    nxt = [(i + 1) % n for i in range(n)]
    alive = np.ones(n, dtype=bool)
    remaining = n
    tris = []

    def turn(i):
        return float(_cross(v[i] - v[prev[i]], v[nxt[i]] - v[i]))

    def is_ear(i):
        a, b, c = prev[i], i, nxt[i]
        if turn(i) <= 0.0:
            return False
        mask = alive.copy()
        mask[[a, b, c]] = False
        pts = v[mask]
        if len(pts) == 0:
            return True
        return not np.any(_in_triangle(pts, v[a], v[b], v[c]))

    def clip(i):
        nonlocal remaining
        a, c = prev[i], nxt[i]
        nxt[a], prev[c] = c, a
        alive[i] = False
        remaining -= 1
        return a

    i, misses = 0, 0
    while remaining > 3:
        # clip ears next to flagged corners first so those corners get fans
        if flagged is not None and flagged.any():
            for j in np.nonzero(alive & flagged)[0]:
                cand = [c for c in (nxt[j], prev[j]) if not flagged[c] and is_ear(c)]
                if cand:
                    i = cand[0]
                    break
        if is_ear(i):
            tris.append((prev[i], i, nxt[i]))
            i, misses = clip(i), 0
            continue
        misses += 1
        if misses > remaining:
            # a full pass without an ear: peel off a straight (collinear) vertex
            j = i
            for _ in range(remaining):
                e1, e2 = v[j] - v[prev[j]], v[nxt[j]] - v[j]
                if abs(turn(j)) <= _ANGLE_TOL * np.hypot(*e1) * np.hypot(*e2) and e1 @ e2 > 0:
                    break
                j = nxt[j]
            else:
                raise PolygonError("ear clipping failed; polygon is not simple")
            i, misses = clip(j), 0
            continue
        i = nxt[i]
    a = i
    tris.append((prev[a], a, nxt[a]))
    t = np.array(tris, dtype=int)
    # drop zero-area triangles produced when a straight vertex is peeled off
    area = _cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    return t[area > 0.0]


def _split_flagged(tris, flags, levels):
    """Split triangles with several flagged vertices so each child has at most one."""
    out_t, out_g, out_l = [], [], []
    for tri, fl, lv in zip(tris, flags, levels):
        idx = np.nonzero(fl)[0]
        if len(idx) == 0:
            out_t.append(tri)
            out_g.append(-1)
            out_l.append(0)
        elif len(idx) == 1:
            out_t.append(tri)
            out_g.append(int(idx[0]))
            out_l.append(int(lv[idx[0]]))
        else:
            a, b, c = tri
            ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
            children = [(np.array([a, ab, ca]), 0), (np.array([ab, b, bc]), 1),
                        (np.array([ca, bc, c]), 2)]
            for child, corner in children:
                out_t.append(child)
                if fl[corner]:
                    out_g.append(corner)
                    out_l.append(int(lv[corner]))
                else:
                    out_g.append(-1)
                    out_l.append(0)
            out_t.append(np.array([ab, bc, ca]))
            out_g.append(-1)
            out_l.append(0)
    return np.array(out_t), np.array(out_g, dtype=int), np.array(out_l, dtype=int)


# -- module-level operations ------------------------------------------------
def interior_angles(p: Polygon) -> AngleSpectrum:
    """Sorted interior angles of ``p`` with ``alpha_j = pi/omega_j``."""
    return p.spectrum


def distance_to_boundary(p, q) -> np.ndarray | float:
    """Distance from ``q`` to the boundary of ``p``; 0 on or outside the boundary."""
    d = p.distance(q)
    return float(d) if np.ndim(d) == 0 else d


def contains(p, q) -> np.ndarray | bool:
    r = getattr(p, "polygon", p).contains(q)
    return bool(r) if np.ndim(r) == 0 else r


def triangulate(p) -> np.ndarray:
    """Ear-clipping triangulation of ``p`` as an array of shape (T, 3, 2)."""
    return getattr(p, "polygon", p).triangles[0]


def boundary_segments(p) -> tuple[Segment, ...]:
    return getattr(p, "polygon", p).segments


# -- sawtooth family ----------------------------------------------------------
def lambda_profile(x):
    """2-periodic tent: ``x`` on [0, 1], ``2 - x`` on [1, 2]."""
    x = np.asarray(x, dtype=float)
    r = np.mod(x, 2.0)
    out = np.where(r <= 1.0, r, 2.0 - r)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SawtoothDomain:
    """The domain above ``y = eps*lambda(x/eps)`` inside the square (0, 1/2)^2.

    ``gamma_eps`` holds only the ``2k`` tooth edges; the three straight sides
    of the box are part of the polygon but not of the sawtooth boundary.
    """

    k: int
    eps: float
    polygon: Polygon = field(repr=False)
    gamma_eps: tuple[Segment, ...] = field(repr=False)

    @property
    def area(self) -> float:
        return self.polygon.area

    @property
    def segments(self) -> tuple[Segment, ...]:
        return self.polygon.segments

    @property
    def corner_flags(self):
        return self.polygon.corner_flags

    @property
    def vertices(self) -> np.ndarray:
        return self.polygon.vertices

    @property
    def spectrum(self) -> AngleSpectrum:
        return self.polygon.spectrum

    def contains(self, points):
        return self.polygon.contains(points)

    def distance(self, points, *, inside_only: bool = True) -> np.ndarray:
        """Exact distance to the boundary of the sawtooth domain.

        Only the three tooth edges under ``[x - eps, x + eps]`` can be
        nearest: a tip lies within horizontal offset ``eps`` of any ``x``,
        and the teeth never rise above ``eps``.
        """
        q = np.asarray(points, dtype=float)
        shape = q.shape[:-1]
        q = q.reshape(-1, 2)
        x, y = q[:, 0], q[:, 1]
        eps, nseg = self.eps, 2 * self.k
        base = np.floor(x / eps).astype(np.int64)
        d = np.minimum(np.minimum(x, 0.5 - x), 0.5 - y)
        for off in (-1, 0, 1):
            s = np.clip(base + off, 0, nseg - 1)
            ax = s * eps
            ay = np.where(s % 2 == 0, 0.0, eps)
            ty = np.where(s % 2 == 0, eps, -eps)
            dx, dy = x - ax, y - ay
            t = np.clip((dx * eps + dy * ty) / (2.0 * eps * eps), 0.0, 1.0)
            rx, ry = dx - t * eps, dy - t * ty
            d = np.minimum(d, np.hypot(rx, ry))
        if inside_only:
            below = y <= eps * lambda_profile(x / eps)
            outside = (x <= 0.0) | (x >= 0.5) | (y >= 0.5) | below
            d = np.where(outside, 0.0, d)
        return d.reshape(shape)

    def cells(self, levels: int = 8):
        """Structured quadrature cells adapted to the sawtooth.

        Valley triangles ``(tip, valley, tip)`` are graded toward the valley
        vertex; the strip ``eps < y < 1/2`` is cut into dyadic layers of
        height ``2^i eps`` whose columns are aligned with the valleys.
        """
        k, eps = self.k, self.eps
        tris, grade = [], []
        # end valleys (angle pi/4) and interior valleys (angle pi/2)
        tris.append([[0.0, 0.0], [eps, eps], [0.0, eps]])
        grade.append(0)
        for j in range(1, k):
            xv = 2 * j * eps
            tris.append([[xv - eps, eps], [xv, 0.0], [xv + eps, eps]])
            grade.append(1)
        tris.append([[0.5 - eps, eps], [0.5, 0.0], [0.5, eps]])
        grade.append(1)
        # dyadic strip
        y0, h = eps, eps
        while y0 < 0.5 - 1e-15:
            y1 = min(y0 + h, 0.5)
            xs = np.arange(0.0, 0.5, h)
            xs = np.append(xs[xs < 0.5 - 1e-15], 0.5)
            for xa, xb in zip(xs[:-1], xs[1:]):
                tris.append([[xa, y0], [xb, y0], [xb, y1]])
                tris.append([[xa, y0], [xb, y1], [xa, y1]])
                grade.extend((-1, -1))
            y0, h = y1, 2 * h
        tris = np.array(tris, dtype=float)
        grade = np.array(grade, dtype=int)
        lv = np.where(grade >= 0, levels, 0)
        return tris, grade, lv


def make_sawtooth(k: int) -> SawtoothDomain:
    """Build the sawtooth domain with ``eps = 1/(4k)``.

    Vertices come from exact rationals ``i/(4k)`` converted once to floats,
    so the tooth vertices are bit-reproducible.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    eps = Fraction(1, 4 * k)
    pts = [(Fraction(0), Fraction(1, 2))]
    for i in range(2 * k + 1):
        pts.append((i * eps, eps if i % 2 else Fraction(0)))
    pts.append((Fraction(1, 2), Fraction(1, 2)))
    verts = np.array([[float(a), float(b)] for a, b in pts])
    flags = [False] + [i % 2 == 0 for i in range(2 * k + 1)] + [False]
    poly = Polygon(verts, flags, check_simple=False)
    gamma = poly.segments[1:1 + 2 * k]
    return SawtoothDomain(k, float(eps), poly, gamma)


# -- stock domains ----------------------------------------------------------
def rectangle(a: float, b: float) -> Polygon:
    return Polygon([[0.0, 0.0], [a, 0.0], [a, b], [0.0, b]])


def square(side: float = 0.5) -> Polygon:
    return rectangle(side, side)


def l_shape(side: float = 1.0) -> Polygon:
    """Square ``(0, side)^2`` minus its upper-right quadrant; reentrant corner at the center."""
    h = 0.5 * side
    return Polygon([[0, 0], [side, 0], [side, h], [h, h], [h, side], [0, side]])


def sector_polygon(alpha: float, n: int = 64, radius: float = 1.0) -> Polygon:
    """Polygonal approximation of the sector ``0 < r < radius, 0 < theta < pi/alpha``.

    The corner at the origin is flagged for quadrature grading.
    """
    opening = math.pi / alpha
    th = np.linspace(0.0, opening, n + 1)
    arc = radius * np.column_stack([np.cos(th), np.sin(th)])
    verts = np.vstack([[0.0, 0.0], arc])
    flags = [True] + [False] * len(arc)
    return Polygon(verts, flags)


def polygon_from_json(text_or_obj) -> Polygon:
    """Load ``{"vertices": [[x, y], ...]}``; invariant violations raise PolygonError."""
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, (str, bytes)) else text_or_obj
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise PolygonError('polygon JSON must be an object with a "vertices" list')
    return Polygon(obj["vertices"], obj.get("corner_flags"))


def polygon_to_json(p: Polygon) -> str:
    return json.dumps({"vertices": p.vertices.tolist()})


def _kv(arg: str) -> dict[str, str]:
    out = {}
    for part in filter(None, arg.split(",")):
        key, _, val = part.partition("=")
        out[key.strip()] = val.strip()
    return out


def _num(s: str) -> float:
    return float(Fraction(s)) if "/" in s else float(s)


def parse_domain(spec: str):
    """Domain from a CLI spec: ``square[:L=]``, ``rect:a=,b=``, ``lshape[:L=]``,
    ``sawtooth:k=``, ``sector:alpha=[,n=]`` or ``file:<path.json>``."""
    name, _, rest = spec.partition(":")
    if name == "file":
        with open(rest, encoding="utf-8") as fh:
            return polygon_from_json(fh.read())
    kv = _kv(rest)
    if name == "square":
        return square(_num(kv.get("L", "0.5")))
    if name == "rect":
        return rectangle(_num(kv["a"]), _num(kv["b"]))
    if name == "lshape":
        return l_shape(_num(kv.get("L", "1")))
    if name == "sawtooth":
        return make_sawtooth(int(kv["k"]))
    if name == "sector":
        return sector_polygon(_num(kv["alpha"]), int(kv.get("n", "64")))
    raise ValueError(f"unknown domain spec {spec!r}")
