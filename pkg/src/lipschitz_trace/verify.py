"""Checks of exact integral identities and inequality chains on test fields.

Each check returns :class:`IdentityCheck` records.  Identities pass when
the relative difference of the two sides is within ``tolerance``;
inequalities (``relation="<="``) pass when ``lhs <= rhs * (1 + tolerance)``.
Fields that violate a check's hypotheses are expected to fail it, which is
how the checks themselves are tested.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .fields import ScalarField
from .norms import (McConfig, area_integral, boundary_integral, gagliardo_seminorm,
                    l2_norm, weighted_grad_norm)

__all__ = [
    "IdentityCheck",
    "MarginViolation",
    "ProbeResult",
    "relative_error",
    "grisvard_mixed_identity",
    "hessian_laplacian_identity",
    "poincare_constant",
    "poincare_chain",
    "boundary_flux_identity",
    "harmonicity_residual",
    "harmonic_equivalence_probe",
]


class MarginViolation(ValueError):
    """A stencil point comes closer than ``2h`` to the boundary."""


def relative_error(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    rel_err: float
    tolerance: float
    passed: bool
    relation: str = "=="
    note: str = ""

    @classmethod
    def make(cls, name: str, lhs: float, rhs: float, tolerance: float,
             relation: str = "==", note: str = "") -> "IdentityCheck":
        lhs, rhs = float(lhs), float(rhs)
        rel = relative_error(lhs, rhs)
        if relation == "==":
            ok = rel <= tolerance
        elif relation == "<=":
            ok = lhs <= rhs * (1.0 + tolerance)
        else:
            raise ValueError(f"unknown relation {relation!r}")
        return cls(name, lhs, rhs, rel, float(tolerance), bool(ok), relation, note)

    def to_dict(self) -> dict:
        return asdict(self)


def _integral(g, f, p, quad_tol):
    return area_integral(g, p, f, tol=quad_tol).value


def grisvard_mixed_identity(f: ScalarField, p, tol: float = 1e-6,
                            quad_tol: float = 1e-10) -> IdentityCheck:
    """``int f_xx f_yy = int f_xy^2`` for ``f`` vanishing on the boundary of ``p``."""
    def mixed(q):
        h = f.hessian(q)
        return h[..., 0, 0] * h[..., 1, 1]

    def cross(q):
        return f.hessian(q)[..., 0, 1] ** 2

    return IdentityCheck.make("grisvard_mixed", _integral(mixed, f, p, quad_tol),
                              _integral(cross, f, p, quad_tol), tol)


def hessian_laplacian_identity(f: ScalarField, p, tol: float = 1e-6,
                               quad_tol: float = 1e-10) -> IdentityCheck:
    """``||D^2 f|| = ||Laplacian f||`` in ``L2(p)`` for ``f`` vanishing on the boundary."""
    def hess(q):
        h = f.hessian(q)
        return np.einsum("...ij,...ij->...", h, h)

    def lap(q):
        return f.laplacian(q) ** 2

    return IdentityCheck.make("hessian_laplacian", math.sqrt(_integral(hess, f, p, quad_tol)),
                              math.sqrt(_integral(lap, f, p, quad_tol)), tol)


def poincare_constant(a: float, b: float) -> float:
    """``1 / sqrt(lambda_1)`` of the Dirichlet Laplacian on an ``a x b`` rectangle."""
    return 1.0 / math.sqrt(math.pi ** 2 * (a ** -2 + b ** -2))


def poincare_chain(f: ScalarField, p, tol: float = 1e-9,
                   quad_tol: float = 1e-12) -> list[IdentityCheck]:
    """Poincare-type bounds by ``||Laplacian f||`` on an axis-aligned rectangle.

    Checks ``||grad f|| <= C_P ||Lap f||`` and
    ``(||grad f||^2 + ||D^2 f||^2)^(1/2) <= (1 + C_P^2)^(1/2) ||Lap f||``.  The
    full sum-of-squares norm including ``||f||^2`` is checked against its own
    constant ``(1 + C_P^2 + C_P^4)^(1/2)``, which follows from applying the
    Poincare inequality twice; the fundamental mode attains it.
    """
    x0, y0, x1, y1 = p.bounds
    cp = poincare_constant(x1 - x0, y1 - y0)

    def sq(q):
        return f.value(q) ** 2

    def grad(q):
        g = f.gradient(q)
        return np.einsum("...i,...i->...", g, g)

    def hess(q):
        h = f.hessian(q)
        return np.einsum("...ij,...ij->...", h, h)

    def lap(q):
        return f.laplacian(q) ** 2

    n0, n1, n2, nl = (math.sqrt(_integral(g, f, p, quad_tol)) for g in (sq, grad, hess, lap))
    return [
        IdentityCheck.make("poincare_grad", n1, cp * nl, tol, "<="),
        IdentityCheck.make("poincare_h2_seminorms", math.hypot(n1, n2),
                           math.sqrt(1.0 + cp ** 2) * nl, tol, "<=",
                           note="H2 norm taken as (|grad f|^2 + |D^2 f|^2)^(1/2)"),
        IdentityCheck.make("poincare_h2_full", math.sqrt(n0 ** 2 + n1 ** 2 + n2 ** 2),
                           math.sqrt(1.0 + cp ** 2 + cp ** 4) * nl, tol, "<=",
                           note="H2 norm taken as the unweighted sum of squares"),
    ]


def _radial(p):
    c = np.asarray(p.centroid, dtype=float)

    def h(q):
        return np.asarray(q, dtype=float) - c

    return h, (lambda q: np.full(np.shape(q)[:-1], 2.0))


def boundary_flux_identity(f: ScalarField, p, h: Callable | None = None,
                           div_h: Callable | None = None, tol: float = 1e-6,
                           quad_tol: float = 1e-10) -> IdentityCheck:
    """``int_bdry (h.n) f^2 = 2 int f grad f.h + int f^2 div h``.

    ``h`` defaults to ``q - centroid(p)`` with divergence 2.  A warning is
    issued when ``h.n <= 0`` at some edge midpoint, since the trace
    estimate built on this identity needs ``h.n`` bounded below.
    """
    if (h is None) != (div_h is None):
        raise ValueError("give both h and div_h, or neither")
    if h is None:
        h, div_h = _radial(p)
    segs = p.segments
    hn = [float(h(s.midpoint[None, :])[0] @ s.normal) for s in segs]
    if min(hn) <= 0.0:
        warnings.warn("h.n <= 0 at some edge midpoint", RuntimeWarning, stacklevel=2)

    def flux(q, seg):
        return (h(q) @ seg.normal) * f.value(q) ** 2

    def bulk(q):
        v = f.value(q)
        return 2.0 * v * np.einsum("...i,...i->...", f.gradient(q), h(q)) + v * v * div_h(q)

    lhs = boundary_integral(flux, f, segs, quad_tol).value
    rhs = _integral(bulk, f, p, quad_tol)
    return IdentityCheck.make("boundary_flux", lhs, rhs, tol)


_STENCIL = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def harmonicity_residual(f: ScalarField, points, h: float, domain=None) -> float:
    """Largest five-point-stencil Laplacian of ``f`` over ``points``.

    Raises
    ------
    MarginViolation
        If a point lies closer than ``2h`` to the boundary of ``domain`` or,
        without a domain, if ``f`` is not defined at offsets ``2h``.
    """
    if not h > 0.0:
        raise ValueError("h must be positive")
    q = np.asarray(points, dtype=float).reshape(-1, 2)
    if domain is not None:
        bad = np.asarray(domain.distance(q)) < 2.0 * h
    else:
        probe = q[:, None, :] + 2.0 * h * _STENCIL[None]
        bad = ~np.all(f.valid(probe), axis=1)
    if np.any(bad):
        raise MarginViolation(f"{int(np.sum(bad))} point(s) closer than 2h={2 * h:g} to the boundary")
    nb = f.value(q[:, None, :] + h * _STENCIL[None])
    lap = (nb.sum(axis=1) - 4.0 * f.value(q)) / (h * h)
    return float(np.max(np.abs(lap)))


@dataclass(frozen=True)
class ProbeResult:
    """Norm ratios over a family of harmonic fields and their max/min spread."""

    names: tuple[str, ...]
    ratios: tuple[float, ...]
    gagliardo_stderr: tuple[float, ...]
    spread: float

    def to_dict(self) -> dict:
        return asdict(self)


def _probe_points(p, margin: float, n: int = 12) -> np.ndarray:
    # an n x n grid over the bounding box, kept where the stencil fits
    x0, y0, x1, y1 = p.bounds
    gx, gy = np.meshgrid(np.linspace(x0, x1, n + 2)[1:-1], np.linspace(y0, y1, n + 2)[1:-1])
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    return pts[np.asarray(p.distance(pts)) >= margin]


def harmonic_equivalence_probe(family: Sequence[ScalarField], p, tol: float = 1e-8,
                               cfg: McConfig | None = None, *, h: float = 1e-3,
                               residual_tol: float = 1e-4) -> ProbeResult:
    """Compare ``||u|| + ||sqrt(rho) grad u||`` with ``||u|| + |u|_{1/2}`` over ``family``.

    Each field is first checked for harmonicity on an interior grid, with
    the stencil residual measured against ``1 + max |D^2 f|``; the spread is ``max/min`` of the ratios.
    """
    if not family:
        raise ValueError("family must be nonempty")
    cfg = cfg or McConfig()
    pts = _probe_points(p, 2.0 * h)
    names, ratios, ses = [], [], []
    for f in family:
        if len(pts):
            keep = np.asarray(f.valid(pts[:, None, :] + 2.0 * h * _STENCIL[None])).all(axis=1)
            if keep.any():
                res = harmonicity_residual(f, pts[keep], h)
                hs = f.hessian(pts[keep])
                scale = 1.0 + float(np.max(np.sqrt(np.einsum("...ij,...ij->...", hs, hs))))
                if res > residual_tol * scale:
                    raise ValueError(f"{f.name} is not harmonic (stencil residual {res:g})")
        l2 = l2_norm(f, p, tol).value
        wg = weighted_grad_norm(f, p, tol).value
        g = gagliardo_seminorm(f, p, 0.5, cfg)
        names.append(f.name)
        ratios.append((l2 + wg) / (l2 + g.value))
        ses.append(g.stderr)
    return ProbeResult(tuple(names), tuple(ratios), tuple(ses), max(ratios) / min(ratios))
