"""Frozen reference values and the independent computations that produced them.

Closed forms are evaluated with mpmath at 30 digits.  The sawtooth area
integrals use scipy's nested adaptive quadrature with the kinks of the
distance function passed as explicit breakpoints, which shares no code
with the package's triangle quadrature.

Run ``python tests/oracles.py`` to recompute everything and compare.
"""

from __future__ import annotations

import math

import mpmath as mp

SQRT2 = math.sqrt(2.0)

# int_0^{1/4} ln(-ln x) dx
LNLN_QUARTER = 0.200320621441693350906
# I_eps = int_0^eps (ln(-ln y) - ln ln 2)^2 dy
I_EPS_QUARTER = 0.371983144594374154355
I_EPS_SIXTEENTH = 0.176677492375045640352
# sqrt(sqrt2 * I(1/4) / (4 * 1/4)), the k = 1 tangential trace norm in arclength
TRACE_NORM_K1 = 0.725302425240365501617
# ||sqrt(rho) D^2 v||^2 on (0, 1/2)^2 is E1(ln 2)
WHESS_SQ_SQUARE = 0.378671043061087976727
WHESS_SQUARE = 0.615362529783125466447
# int_0^{1/2} y (y ln y)^-2 (1/2) dy = 1/(2 ln 2): the rho <= y majorant
WHESS_SQ_MAJORANT = 0.7213475204444817
# ||sqrt(rho) D^2 product_sine(1,1,1/2)|| on its square
WHESS_SINE11 = 6.115921779411409792
# sawtooth k = 1: int rho and int rho / (y ln y)^2
RHO_INT_K1 = 0.010169903431022654
WHESS_SQ_K1 = 0.08643872860158176
WHESS_K1 = 0.2940046404422586
# int rho over the triangle (0,0), (1/4,1/4), (0,1/4); rho = min(x, (y-x)/sqrt2) is piecewise linear
RHO_INT_TRIANGLE = 0.0010786811520132682


def mp_lnln(eps):
    """``int_0^eps ln(-ln x) dx = eps ln(-ln eps) + E1(-ln eps)``."""
    L = -mp.log(eps)
    return eps * mp.log(L) + mp.e1(L)


def mp_i_eps(eps):
    """``I_eps`` through the substitution ``x = e^-t``."""
    L = -mp.log(eps)
    c = mp.log(mp.log(2))
    sq = mp.quad(lambda t: mp.log(t) ** 2 * mp.exp(-t), [L, 2 * L, mp.inf])
    return sq - 2 * c * (eps * mp.log(L) + mp.e1(L)) + eps * c ** 2


def mp_sine11_whess():
    """``int rho |D^2 f|^2`` for ``f = sin(2 pi x) sin(2 pi y)`` on ``(0, 1/2)^2`` by symmetry."""
    k = 2 * mp.pi

    def inner(x):
        # one quarter of the square: 0 < x < 1/4, x < y < 1/2 - x, where rho = x
        def h(y):
            sx, cx, sy, cy = mp.sin(k * x), mp.cos(k * x), mp.sin(k * y), mp.cos(k * y)
            return k ** 4 * (2 * (sx * sy) ** 2 + 2 * (cx * cy) ** 2)
        return x * mp.quad(h, [x, mp.mpf(1) / 4, mp.mpf(1) / 2 - x])

    return 4 * mp.quad(inner, [0, mp.mpf(1) / 4])


def _sawtooth_rho(x, y):
    d = min(x, 0.5 - y)
    ds = (y - x) / SQRT2 if x + y <= 0.5 else math.hypot(x - 0.25, y - 0.25)
    return min(d, ds)


def scipy_sawtooth_k1(weight):
    """``2 int_{x < 1/4} rho w(y)`` over the k = 1 sawtooth domain."""
    import numpy as np
    from scipy.integrate import quad

    def inner(y):
        hi = min(y, 0.25)
        c = [y / (1 + SQRT2), 0.5 - y, y - SQRT2 * (0.5 - y), 2 * (1 / 16 + (y - 0.25) ** 2)]
        q = (0.5 - y) ** 2 - (y - 0.25) ** 2
        if q >= 0:
            c += [0.25 - math.sqrt(q), 0.25 + math.sqrt(q)]
        pts = sorted(p for p in c if 0 < p < hi)
        return quad(lambda x: _sawtooth_rho(x, y) * weight(y), 0, hi, points=pts or None,
                    epsabs=0, epsrel=1e-13, limit=200)[0]

    edges = np.concatenate([[0.0], 0.25 * 0.5 ** np.arange(60, 0, -1), np.linspace(0.125, 0.5, 301)[1:]])
    edges = np.unique(np.concatenate([edges, [0.25, SQRT2 / 2 / (1 + SQRT2)]]))
    return 2 * math.fsum(quad(inner, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
                         for a, b in zip(edges[:-1], edges[1:]))


def rho_triangle_exact():
    # rho is linear on the two pieces cut by the ray x = y / (1 + sqrt2)
    xk = 0.25 / (1 + SQRT2)

    def lin(tri, fun):
        (x0, y0), (x1, y1), (x2, y2) = tri
        area = abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)) / 2
        return area * sum(fun(p) for p in tri) / 3

    return (lin([(0, 0), (xk, 0.25), (0, 0.25)], lambda p: p[0])
            + lin([(0, 0), (0.25, 0.25), (xk, 0.25)], lambda p: (p[1] - p[0]) / SQRT2))


if __name__ == "__main__":
    mp.mp.dps = 30
    print("lnln(1/4)", mp_lnln(mp.mpf(1) / 4), LNLN_QUARTER)
    print("I(1/4)", mp_i_eps(mp.mpf(1) / 4), I_EPS_QUARTER)
    print("I(1/16)", mp_i_eps(mp.mpf(1) / 16), I_EPS_SIXTEENTH)
    print("E1(ln2)", mp.e1(mp.log(2)), WHESS_SQ_SQUARE)
    print("sine11", mp.sqrt(mp_sine11_whess()), WHESS_SINE11)
    print("rho k=1", scipy_sawtooth_k1(lambda y: 1.0), RHO_INT_K1)
    print("whess k=1", scipy_sawtooth_k1(lambda y: 1 / (y * math.log(y)) ** 2), WHESS_SQ_K1)
    print("triangle", rho_triangle_exact(), RHO_INT_TRIANGLE)
