"""Evaluable scalar fields with closed-form gradients and Hessians.

All evaluators take points of shape ``(..., 2)`` and return values of
shape ``(...)``, gradients ``(..., 2)`` and symmetric Hessians
``(..., 2, 2)``.  Fields are immutable and evaluation is pure.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .quadrature import Quad1D, gauss_legendre, integrate_1d

__all__ = [
    "OutOfDomain",
    "ScalarField",
    "Constant",
    "Polynomial",
    "SectorSingularZ",
    "SectorHarmonic",
    "CutoffSingularS",
    "NecasV",
    "ProductSine",
    "Bump",
    "AffineCombination",
    "product_sine",
    "affine_combination",
    "eval_necas_vy",
    "harmonic_polynomials",
    "parse_field",
]

LN_LN2 = math.log(math.log(2.0))


class OutOfDomain(ValueError):
    """A field was evaluated outside the set where it is defined."""


def _pts(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != 2:
        raise ValueError("points must have a trailing dimension of size 2")
    return q


def _sym(hxx, hxy, hyy) -> np.ndarray:
    h = np.empty(np.shape(hxx) + (2, 2))
    h[..., 0, 0] = hxx
    h[..., 0, 1] = hxy
    h[..., 1, 0] = hxy
    h[..., 1, 1] = hyy
    return h


class ScalarField:
    """Base class: subclasses implement ``_value``, ``_gradient``, ``_hessian``.

    ``valid(q)`` describes the domain; the public evaluators raise
    :class:`OutOfDomain` when any point falls outside it.  ``valid_value``
    may be larger (the value often extends continuously to the edge of the
    domain while derivatives blow up).

    ``singular_points`` and ``singular_lines`` are hints for quadrature:
    points ``(x, y)`` and lines ``(nx, ny, c)`` meaning ``nx x + ny y = c``
    near which derivatives are singular.
    """

    name = "field"
    singular_points: tuple = ()
    singular_lines: tuple = ()

    def valid(self, q) -> np.ndarray:
        return np.ones(_pts(q).shape[:-1], dtype=bool)

    def valid_value(self, q) -> np.ndarray:
        return self.valid(q)

    def _check(self, q, valid=None) -> np.ndarray:
        q = _pts(q)
        ok = (valid or self.valid)(q)
        if not np.all(ok):
            bad = q[~np.asarray(ok)].reshape(-1, 2)[0]
            raise OutOfDomain(f"{self.name}: point ({bad[0]:.6g}, {bad[1]:.6g}) outside its domain")
        return q

    def value(self, q):
        return self._value(self._check(q, self.valid_value))

    def gradient(self, q):
        return self._gradient(self._check(q))

    def hessian(self, q):
        return self._hessian(self._check(q))

    def laplacian(self, q):
        h = self.hessian(q)
        return h[..., 0, 0] + h[..., 1, 1]

    __call__ = value

    # field algebra
    def __add__(self, other):
        return AffineCombination([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return AffineCombination([(1.0, self), (-1.0, other)])

    def __mul__(self, c):
        return AffineCombination([(float(c), self)])

    __rmul__ = __mul__

    def __neg__(self):
        return AffineCombination([(-1.0, self)])


class Constant(ScalarField):
    def __init__(self, c: float = 1.0):
        self.c = float(c)
        self.name = f"const({self.c:g})"

    def _value(self, q):
        return np.full(q.shape[:-1], self.c)

    def _gradient(self, q):
        return np.zeros(q.shape)

    def _hessian(self, q):
        return np.zeros(q.shape[:-1] + (2, 2))


class Polynomial(ScalarField):
    """Bivariate polynomial from ``{(i, j): c}`` meaning ``c x^i y^j``."""

    def __init__(self, coeffs: dict, name: str = "poly"):
        self.coeffs = {(int(i), int(j)): float(c) for (i, j), c in coeffs.items() if c != 0}
        self.name = name

    def _eval(self, q, dx, dy):
        x, y = q[..., 0], q[..., 1]
        out = np.zeros(q.shape[:-1])
        for (i, j), c in self.coeffs.items():
            if i < dx or j < dy:
                continue
            fx = math.perm(i, dx)
            fy = math.perm(j, dy)
            out = out + c * fx * fy * x ** (i - dx) * y ** (j - dy)
        return out

    def _value(self, q):
        return self._eval(q, 0, 0)

    def _gradient(self, q):
        return np.stack([self._eval(q, 1, 0), self._eval(q, 0, 1)], axis=-1)

    def _hessian(self, q):
        return _sym(self._eval(q, 2, 0), self._eval(q, 1, 1), self._eval(q, 0, 2))


def harmonic_polynomials() -> list[Polynomial]:
    """The family 1, x, x^2 - y^2, xy, Re (x + iy)^3."""
    return [
        Polynomial({(0, 0): 1.0}, "1"),
        Polynomial({(1, 0): 1.0}, "x"),
        Polynomial({(2, 0): 1.0, (0, 2): -1.0}, "x2-y2"),
        Polynomial({(1, 1): 1.0}, "xy"),
        Polynomial({(3, 0): 1.0, (1, 2): -3.0}, "re-z3"),
    ]


def _polar(q):
    x, y = q[..., 0], q[..., 1]
    r = np.hypot(x, y)
    th = np.mod(np.arctan2(y, x), 2.0 * math.pi)
    return r, th


def _polar_to_cartesian(r, th, u, ur, ut, urr, urt, utt):
    """Chain rule from polar derivatives to Cartesian gradient and Hessian."""
    c, s = np.cos(th), np.sin(th)
    gx = c * ur - s * ut / r
    gy = s * ur + c * ut / r
    r2 = r * r
    hxx = c * c * urr + s * s * ur / r + s * s * utt / r2 - 2 * s * c * urt / r + 2 * s * c * ut / r2
    hyy = s * s * urr + c * c * ur / r + c * c * utt / r2 + 2 * s * c * urt / r - 2 * s * c * ut / r2
    hxy = (s * c * urr - s * c * ur / r - s * c * utt / r2
           + (c * c - s * s) * urt / r - (c * c - s * s) * ut / r2)
    return u, np.stack([gx, gy], axis=-1), _sym(hxx, hxy, hyy)


class _RadialSine(ScalarField):
    """Fields of the form ``R(r) sin(alpha theta)`` on a sector with vertex at the origin."""

    alpha: float
    radius: float = math.inf
    singular_points = ((0.0, 0.0),)

    def valid(self, q):
        r, th = _polar(_pts(q))
        return (r > 0.0) & (r < self.radius) & (th > 0.0) & (th < math.pi / self.alpha)

    def valid_value(self, q):
        # closed sector minus the vertex; slack absorbs rounding of theta on the rays
        r, th = _polar(_pts(q))
        top = math.pi / self.alpha
        th = np.where(th > math.pi + 0.5 * top, th - 2.0 * math.pi, th)
        slack = 1e-12
        return ((r > 0.0) & (r <= self.radius * (1 + slack))
                & (th >= -slack) & (th <= top * (1 + slack)))

    def _radial(self, r):
        raise NotImplementedError

    def _all(self, q):
        r, th = _polar(q)
        R, R1, R2 = self._radial(r)
        a = self.alpha
        S, S1, S2 = np.sin(a * th), a * np.cos(a * th), -a * a * np.sin(a * th)
        return _polar_to_cartesian(r, th, R * S, R1 * S, R * S1, R2 * S, R1 * S1, R * S2)

    def _value(self, q):
        r, th = _polar(q)
        return self._radial(r)[0] * np.sin(self.alpha * th)

    def _gradient(self, q):
        return self._all(q)[1]

    def _hessian(self, q):
        return self._all(q)[2]


class SectorSingularZ(_RadialSine):
    """``(r^-alpha - r^alpha) sin(alpha theta)`` on ``0 < r < 1, 0 < theta < pi/alpha``.

    Harmonic, zero on the sector boundary, and in ``H^t`` only for
    ``t < 1 - alpha``.
    """

    radius = 1.0

    def __init__(self, alpha: float):
        if not 0.5 < alpha < 1.0:
            raise ValueError("alpha must lie in (1/2, 1)")
        self.alpha = float(alpha)
        self.name = f"sector-z(alpha={self.alpha:g})"

    def _radial(self, r):
        a = self.alpha
        return (r ** -a - r ** a,
                -a * r ** (-a - 1) - a * r ** (a - 1),
                a * (a + 1) * r ** (-a - 2) - a * (a - 1) * r ** (a - 2))


class SectorHarmonic(_RadialSine):
    """``r^alpha sin(alpha theta)`` on the infinite sector of opening ``pi/alpha``."""

    def __init__(self, alpha: float):
        self.alpha = float(alpha)
        self.name = f"sector-harmonic(alpha={self.alpha:g})"

    def _radial(self, r):
        a = self.alpha
        return r ** a, a * r ** (a - 1), a * (a - 1) * r ** (a - 2)


def _smoothstep(t):
    """Quintic ramp 6t^5 - 15t^4 + 10t^3 clipped to [0, 1], with two derivatives."""
    t = np.clip(t, 0.0, 1.0)
    p = t ** 3 * (10 - 15 * t + 6 * t * t)
    p1 = 30 * t * t * (1 - t) ** 2
    p2 = 60 * t * (1 - t) * (1 - 2 * t)
    return p, p1, p2


class CutoffSingularS(_RadialSine):
    """``eta(r) r^alpha sin(alpha theta)`` with a C^2 cutoff ``eta``.

    ``eta = 1`` on ``[0, a/2]``, a quintic ramp down on ``[a/2, a]`` and 0
    beyond ``a``.
    """

    def __init__(self, alpha_star: float, a: float = 0.25):
        if not 0.0 < a < 1.0:
            raise ValueError("cutoff radius a must lie in (0, 1)")
        self.alpha = float(alpha_star)
        self.a = float(a)
        self.name = f"cutoff-s(alpha={self.alpha:g},a={self.a:g})"

    def eta(self, r):
        h = 0.5 * self.a
        p, p1, p2 = _smoothstep((np.asarray(r, dtype=float) - h) / h)
        return 1.0 - p, -p1 / h, -p2 / (h * h)

    def _radial(self, r):
        a = self.alpha
        e, e1, e2 = self.eta(r)
        # the cutoff fast-path: everything vanishes identically for r >= a
        rr = np.where(r < self.a, r, 1.0)
        p0, p1, p2 = rr ** a, a * rr ** (a - 1), a * (a - 1) * rr ** (a - 2)
        R = e * p0
        R1 = e1 * p0 + e * p1
        R2 = e2 * p0 + 2 * e1 * p1 + e * p2
        out = r < self.a
        return np.where(out, R, 0.0), np.where(out, R1, 0.0), np.where(out, R2, 0.0)


def eval_necas_vy(y):
    """``ln(-ln y) - ln(ln 2)``, the y-derivative of the Necas field, for 0 < y < 1."""
    y = np.asarray(y, dtype=float)
    if np.any((y <= 0.0) | (y >= 1.0)):
        raise OutOfDomain("necas: v_y needs 0 < y < 1")
    out = np.log(-np.log(y)) - LN_LN2
    return float(out) if out.ndim == 0 else out


class NecasV(ScalarField):
    """``v(x, y) = int_0^y (ln(-ln s) - ln(ln 2)) ds``, a function of ``y`` only.

    Gradient and Hessian are closed forms.  The value comes from cumulative
    graded quadrature tabulated once at construction.
    """

    name = "necas"
    _GL = 24
    singular_lines = ((0.0, 1.0, 0.0),)

    def __init__(self):
        lo = 0.5 * 0.5 ** np.arange(60, 0, -1, dtype=float)
        hi = 1.0 - 0.5 * 0.5 ** np.arange(1, 20, dtype=float)
        breaks = np.concatenate([[0.0], lo, [0.5], hi])
        breaks = np.unique(breaks)
        rule = Quad1D(singular_left=True)
        cum = [0.0]
        for a, b in zip(breaks[:-1], breaks[1:]):
            r = integrate_1d(eval_necas_vy, a, b, rule.flagged(a == 0.0, False), tol=1e-13)
            cum.append(cum[-1] + r.value)
        self._breaks = breaks
        self._cum = np.array(cum)
        self._breaks.setflags(write=False)
        self._cum.setflags(write=False)

    def valid(self, q):
        y = _pts(q)[..., 1]
        return (y > 0.0) & (y < 1.0)

    def valid_value(self, q):
        # v extends continuously by v(x, 0) = 0
        y = _pts(q)[..., 1]
        return (y >= 0.0) & (y < 1.0)

    def profile(self, y):
        """``v`` as a function of ``y`` alone (``v = 0`` at ``y = 0``)."""
        y = np.asarray(y, dtype=float)
        if np.any((y < 0.0) | (y >= 1.0)):
            raise OutOfDomain("necas: v needs 0 <= y < 1")
        i = np.clip(np.searchsorted(self._breaks, y, side="right") - 1, 0, len(self._breaks) - 2)
        a = self._breaks[i]
        x, w = gauss_legendre(self._GL)
        # keep nodes off y = 0 where the integrand is undefined; the piece is empty there
        h = np.where(y > a, y - a, 0.0)
        t = np.where((y > a)[..., None], a[..., None] + h[..., None] * x, 0.5)
        part = (eval_necas_vy(t) @ w) * h
        return self._cum[i] + part

    def _value(self, q):
        return self.profile(q[..., 1])

    def _gradient(self, q):
        g = np.zeros(q.shape)
        g[..., 1] = eval_necas_vy(q[..., 1])
        return g

    def _hessian(self, q):
        y = q[..., 1]
        z = np.zeros(y.shape)
        return _sym(z, z, 1.0 / (y * np.log(y)))


class ProductSine(ScalarField):
    """``sin(m pi x / L) sin(n pi y / L)``; vanishes on the boundary of (0, L)^2."""

    def __init__(self, m: int, n: int, L: float):
        if m < 1 or n < 1 or not L > 0:
            raise ValueError("need m, n >= 1 and L > 0")
        self.m, self.n, self.L = int(m), int(n), float(L)
        self.kx, self.ky = self.m * math.pi / self.L, self.n * math.pi / self.L
        self.name = f"product-sine(m={m},n={n},L={L:g})"

    @property
    def eigenvalue(self) -> float:
        """``lambda`` with ``-Laplacian f = lambda f``."""
        return self.kx ** 2 + self.ky ** 2

    def _parts(self, q):
        x, y = q[..., 0], q[..., 1]
        return (np.sin(self.kx * x), np.cos(self.kx * x), np.sin(self.ky * y), np.cos(self.ky * y))

    def _value(self, q):
        sx, _, sy, _ = self._parts(q)
        return sx * sy

    def _gradient(self, q):
        sx, cx, sy, cy = self._parts(q)
        return np.stack([self.kx * cx * sy, self.ky * sx * cy], axis=-1)

    def _hessian(self, q):
        sx, cx, sy, cy = self._parts(q)
        return _sym(-self.kx ** 2 * sx * sy, self.kx * self.ky * cx * cy, -self.ky ** 2 * sx * sy)


def product_sine(m: int, n: int, L: float) -> ProductSine:
    return ProductSine(m, n, L)


class Bump(ScalarField):
    """Compactly supported ``(1 - |q - c|^2 / rho^2)^4``, C^3 across its support edge."""

    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.name = f"bump(c=({self.center[0]:g},{self.center[1]:g}),r={self.radius:g})"

    def support_inside(self, domain) -> bool:
        """Whether the closed support sits strictly inside ``domain``."""
        d = domain.distance(self.center[None, :])[0]
        return bool(d > self.radius)

    def _s(self, q):
        d = q - self.center
        return d, 1.0 - np.einsum("...i,...i->...", d, d) / self.radius ** 2

    def _value(self, q):
        _, s = self._s(q)
        return np.where(s > 0, s, 0.0) ** 4

    def _gradient(self, q):
        d, s = self._s(q)
        sp = np.where(s > 0, s, 0.0)
        return (-8.0 / self.radius ** 2) * (sp ** 3)[..., None] * d

    def _hessian(self, q):
        d, s = self._s(q)
        sp = np.where(s > 0, s, 0.0)
        r2 = self.radius ** 2
        a = -8.0 / r2 * sp ** 3
        b = 48.0 / r2 ** 2 * sp ** 2
        return _sym(a + b * d[..., 0] ** 2, b * d[..., 0] * d[..., 1], a + b * d[..., 1] ** 2)


class AffineCombination(ScalarField):
    """Pointwise linear combination ``sum c_i f_i``; valid where every term is."""

    def __init__(self, terms):
        flat = []
        for c, f in terms:
            if isinstance(f, AffineCombination):
                flat.extend((c * c2, f2) for c2, f2 in f.terms)
            elif isinstance(f, ScalarField):
                flat.append((float(c), f))
            else:
                raise TypeError(f"not a ScalarField: {f!r}")
        if not flat:
            raise ValueError("affine combination needs at least one term")
        self.terms = tuple(flat)
        self.name = " + ".join(f"{c:g}*{f.name}" for c, f in flat)

    def valid(self, q):
        ok = np.ones(_pts(q).shape[:-1], dtype=bool)
        for _, f in self.terms:
            ok &= f.valid(q)
        return ok

    def valid_value(self, q):
        ok = np.ones(_pts(q).shape[:-1], dtype=bool)
        for _, f in self.terms:
            ok &= f.valid_value(q)
        return ok

    @property
    def singular_points(self):
        return tuple(dict.fromkeys(pt for _, f in self.terms for pt in f.singular_points))

    @property
    def singular_lines(self):
        return tuple(dict.fromkeys(ln for _, f in self.terms for ln in f.singular_lines))

    def _value(self, q):
        return sum(c * f._value(q) for c, f in self.terms)

    def _gradient(self, q):
        return sum(c * f._gradient(q) for c, f in self.terms)

    def _hessian(self, q):
        return sum(c * f._hessian(q) for c, f in self.terms)


def affine_combination(terms) -> AffineCombination:
    return AffineCombination(terms)


def _kv(arg: str) -> dict[str, str]:
    out = {}
    for part in filter(None, arg.split(",")):
        key, _, val = part.partition("=")
        out[key.strip()] = val.strip()
    return out


def _num(s: str) -> float:
    return float(Fraction(s)) if "/" in s else float(s)


def parse_field(spec: str) -> ScalarField:
    """Field from a CLI spec.

    ``necas``, ``sector-z:alpha=<v>``, ``cutoff-s:alpha=<v>,a=<v>``,
    ``product-sine:m=,n=,L=``, ``harmonic:<1|x|x2-y2|xy|re-z3>``,
    ``const:c=<v>`` and ``bump:cx=,cy=,r=``.
    """
    name, _, rest = spec.partition(":")
    kv = _kv(rest)
    if name == "necas":
        return NecasV()
    if name == "sector-z":
        return SectorSingularZ(_num(kv["alpha"]))
    if name == "cutoff-s":
        return CutoffSingularS(_num(kv["alpha"]), _num(kv.get("a", "0.25")))
    if name == "product-sine":
        return ProductSine(int(kv["m"]), int(kv["n"]), _num(kv["L"]))
    if name == "harmonic":
        for p in harmonic_polynomials():
            if p.name == rest:
                return p
        raise ValueError(f"unknown harmonic polynomial {rest!r}")
    if name == "const":
        return Constant(_num(kv.get("c", "1")))
    if name == "bump":
        return Bump((_num(kv["cx"]), _num(kv["cy"])), _num(kv["r"]))
    raise ValueError(f"unknown field spec {spec!r}")
