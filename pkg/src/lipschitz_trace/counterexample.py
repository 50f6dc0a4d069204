"""The sawtooth family: trace norms that diverge while interior norms stay bounded.

On ``Omega_eps`` (the half-square above ``k`` teeth of height ``eps = 1/(4k)``)
the Necas field ``v`` has bounded weighted interior norms, but its
tangential derivative along the teeth grows like ``ln(-ln eps)``.

Arclength bookkeeping
---------------------
A tooth edge has slope +-1, so ``d_tau v = +-(sqrt2/2) v_y`` and
``ds = sqrt2 dx``.  One tooth therefore contributes ``(sqrt2/2) * I`` with
``I = int_0^eps v_y(y)^2 dy``, and the ``2k = 1/(2 eps)`` teeth give

    ||d_tau v||^2 = sqrt2 * I / (4 eps)        (arclength)

The dx-measure reading drops the ``sqrt2`` and gives ``I / (4 eps)``.  Both
are reported; the arclength value is the one checked against direct
integration over every tooth and the one tabulated.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .fields import LN_LN2, NecasV, OutOfDomain, eval_necas_vy
from .geometry import make_sawtooth
from .norms import l2_norm, tangential_deriv_l2, weighted_hess_norm
from .quadrature import NonConvergence, Quad1D, integrate_1d

__all__ = [
    "ConsistencyFailure",
    "IEps",
    "TraceNorm",
    "CounterexampleRow",
    "COLUMNS",
    "dtau_v_on_tooth",
    "I_eps",
    "lower_bound",
    "eps_threshold",
    "trace_norm_gamma",
    "bounded_interior_norms",
    "divergence_table",
]

SQRT2 = math.sqrt(2.0)
# CSV column order
COLUMNS = ("k", "eps", "I_eps", "trace_norm", "lower_bound", "weighted_hess", "l2", "flags")
# relative agreement required of I against I1 - I2 + I3
_IDENTITY_RTOL = 1e-9


class ConsistencyFailure(ArithmeticError):
    """Two independent computations of the same quantity disagree."""


def _eps_of(k: int) -> float:
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return 1.0 / (4 * int(k))


def dtau_v_on_tooth(x, eps: float):
    """Tangential derivative of ``v`` along the teeth, as a function of ``x``.

    Rising edges (``x mod 2eps`` in ``(0, eps)``) give ``+(sqrt2/2) v_y(y)``
    with ``y`` the height above the valley; falling edges give the
    negative at the mirrored height.

    Raises
    ------
    OutOfDomain
        At valleys and tips, where the tangent is undefined.
    """
    x = np.asarray(x, dtype=float)
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if np.any((x <= 0.0) | (x >= 0.5)):
        raise OutOfDomain("x must lie in (0, 1/2)")
    r = np.mod(x, 2.0 * eps)
    rising = r < eps
    y = np.where(rising, r, 2.0 * eps - r)
    if np.any((y <= 0.0) | (r == eps)):
        raise OutOfDomain("tooth vertex: the tangent is not defined there")
    out = np.where(rising, 1.0, -1.0) * (SQRT2 / 2.0) * eval_necas_vy(y)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class IEps:
    """``I = I1 - I2 + I3`` with the quadrature error of each part."""

    eps: float
    I: float
    I1: float
    I2: float
    I3: float
    error_estimate: float
    identity_rel_err: float

    def __iter__(self):
        return iter((self.I, self.I1, self.I2, self.I3))


def I_eps(eps: float, tol: float = 1e-12) -> IEps:
    """Integrals of ``v_y^2`` and of its expanded parts over ``(0, eps)``.

    Raises
    ------
    ConsistencyFailure
        If ``I`` and ``I1 - I2 + I3`` differ by more than ``1e-9`` relative.
    """
    if not 0.0 < eps < 1.0 / math.e:
        raise ValueError(f"eps must lie in (0, 1/e), got {eps!r}")
    rule = Quad1D(singular_left=True)
    r = integrate_1d(lambda x: eval_necas_vy(x) ** 2, 0.0, eps, rule, tol)
    r1 = integrate_1d(lambda x: np.log(-np.log(x)) ** 2, 0.0, eps, rule, tol)
    r2 = integrate_1d(lambda x: np.log(-np.log(x)), 0.0, eps, rule, tol)
    I1 = r1.value
    I2 = 2.0 * LN_LN2 * r2.value
    I3 = eps * LN_LN2 ** 2
    rhs = I1 - I2 + I3
    rel = abs(r.value - rhs) / max(abs(r.value), abs(rhs), 1e-300)
    if rel > _IDENTITY_RTOL:
        raise ConsistencyFailure(f"I - (I1 - I2 + I3) = {r.value - rhs:g} at eps={eps:g}")
    err = r.error_estimate + r1.error_estimate + 2.0 * abs(LN_LN2) * r2.error_estimate
    return IEps(eps, r.value, I1, I2, I3, err, rel)


def lower_bound(eps: float) -> float:
    """``ln(-ln eps) / (2 sqrt2)``, the divergent lower bound of the trace norm."""
    return math.log(-math.log(eps)) / (2.0 * SQRT2)


@lru_cache(maxsize=None)
def eps_threshold(m_max: int = 60, tol: float = 1e-12) -> float:
    """Largest ``eps = 2^-m`` below which ``I >= (eps/2) ln(-ln eps)^2`` holds throughout the scan.

    The scan runs over ``m = 2 .. m_max``; ``0.0`` means the bound fails at
    the smallest scanned ``eps``.
    """
    holds = []
    for m in range(2, m_max + 1):
        e = 2.0 ** -m
        holds.append(I_eps(e, tol).I >= 0.5 * e * math.log(-math.log(e)) ** 2)
    # first m from which the bound persists to the end of the scan
    first = None
    for i in range(len(holds) - 1, -1, -1):
        if not holds[i]:
            break
        first = i + 2
    return 0.0 if first is None else 2.0 ** -first


@dataclass(frozen=True)
class TraceNorm:
    """``||d_tau v||_{L2(Gamma_eps)}`` by the one-tooth reduction and by direct summation."""

    k: int
    value: float
    error_estimate: float
    dx_measure: float
    direct: float | None
    direct_error: float | None
    matches: str

    def __float__(self) -> float:
        return self.value


def trace_norm_gamma(k: int, tol: float = 1e-10, *, cross_check: bool = True) -> TraceNorm:
    """Tangential trace norm of ``v`` on the ``2k`` teeth.

    The primary path uses one tooth integral ``I`` and periodicity.  With
    ``cross_check`` every tooth edge is integrated separately as well;
    ``matches`` names the convention closer to that direct sum.

    Raises
    ------
    ConsistencyFailure
        If the two paths differ by more than 10x their combined error
        estimates (with a floor of ``tol`` relative).
    """
    eps = _eps_of(k)
    ie = I_eps(eps, min(tol, 1e-12))
    sq = SQRT2 * ie.I / (4.0 * eps)
    val = math.sqrt(sq)
    err = SQRT2 * ie.error_estimate / (4.0 * eps) / (2.0 * val)
    dx = math.sqrt(ie.I / (4.0 * eps))
    if not cross_check:
        return TraceNorm(int(k), val, err, dx, None, None, "arclength")
    d = tangential_deriv_l2(NecasV(), make_sawtooth(k).gamma_eps, tol)
    bound = 10.0 * (err + d.error_estimate) + tol * val
    if abs(d.value - val) > bound:
        raise ConsistencyFailure(
            f"k={k}: periodicity reduction {val!r} vs direct sum {d.value!r}")
    matches = "arclength" if abs(d.value - val) <= abs(d.value - dx) else "dx"
    return TraceNorm(int(k), val, err, dx, d.value, d.error_estimate, matches)


def bounded_interior_norms(k: int, tol: float = 1e-6, *, workers: int = 0):
    """``||sqrt(rho) D^2 v||`` and ``||v||`` in ``L2(Omega_eps)``, as :class:`NormValue`."""
    dom = make_sawtooth(k)
    v = NecasV()
    return (weighted_hess_norm(v, dom, tol=tol, workers=workers),
            l2_norm(v, dom, tol=min(tol, 1e-8), workers=workers))


@dataclass
class CounterexampleRow:
    k: int
    eps: float
    I_eps: float = math.nan
    trace_norm: float = math.nan
    lower_bound: float = math.nan
    weighted_hess: float = math.nan
    l2_omega: float = math.nan
    errors: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flags

    def csv_fields(self) -> list[str]:
        nums = (self.eps, self.I_eps, self.trace_norm, self.lower_bound, self.weighted_hess, self.l2_omega)
        return [str(self.k), *(repr(float(x)) for x in nums), ";".join(self.flags)]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "eps": self.eps,
            "I_eps": self.I_eps,
            "trace_norm": self.trace_norm,
            "lower_bound": self.lower_bound,
            "weighted_hess": self.weighted_hess,
            "l2": self.l2_omega,
            "errors": dict(self.errors),
            "flags": list(self.flags),
        }


def _row(k: int, tol: float, interior_tol: float, threshold: float, workers: int) -> CounterexampleRow:
    eps = _eps_of(k)
    row = CounterexampleRow(int(k), eps, lower_bound=lower_bound(eps))
    try:
        ie = I_eps(eps, min(tol, 1e-12))
        row.I_eps, row.errors["I_eps"] = ie.I, ie.error_estimate
        tn = trace_norm_gamma(k, tol)
        row.trace_norm, row.errors["trace_norm"] = tn.value, tn.error_estimate
        row.errors["trace_norm_direct"] = tn.direct
    except ConsistencyFailure:
        row.flags.append("consistency")
    except NonConvergence:
        row.flags.append("trace_nonconvergence")
    try:
        wh, l2 = bounded_interior_norms(k, interior_tol, workers=workers)
        row.weighted_hess, row.errors["weighted_hess"] = wh.value, wh.error_estimate
        row.l2_omega, row.errors["l2"] = l2.value, l2.error_estimate
    except NonConvergence:
        row.flags.append("interior_nonconvergence")
    nums = (row.I_eps, row.trace_norm, row.weighted_hess, row.l2_omega)
    if not row.flags and not all(math.isfinite(x) and x >= 0.0 for x in nums):
        row.flags.append("not_finite")
    if eps <= threshold and not row.trace_norm >= row.lower_bound:
        row.flags.append("below_lower_bound")
    return row


def divergence_table(k_list: Sequence[int], tol: float = 1e-10, interior_tol: float = 1e-6,
                     *, workers: int = 0) -> list[CounterexampleRow]:
    """One :class:`CounterexampleRow` per ``k``; failures are flagged, not raised.

    Rows are independent and run on up to ``workers`` threads (0 = serial);
    each row's result does not depend on the thread count.
    """
    ks = [int(k) for k in k_list]
    if not ks:
        raise ValueError("k_list must be nonempty")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k_list must be strictly increasing")
    for k in ks:
        _eps_of(k)
    threshold = eps_threshold()
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(lambda k: _row(k, tol, interior_tol, threshold, 0), ks))
    return [_row(k, tol, interior_tol, threshold, 0) for k in ks]
