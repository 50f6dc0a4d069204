"""Numerical checks of trace inequalities for harmonic functions on Lipschitz polygons.

Polygonal domains and the sawtooth family, corner-singular test fields,
harmonic-kernel dimension counts, weighted and fractional Sobolev norms,
and checks of the integral identities they satisfy.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .counterexample import (ConsistencyFailure, CounterexampleRow, I_eps, bounded_interior_norms,
                             divergence_table, dtau_v_on_tooth, eps_threshold, trace_norm_gamma)
from .fields import NecasV, OutOfDomain, ScalarField, SectorSingularZ, parse_field, product_sine
from .geometry import (Polygon, PolygonError, SawtoothDomain, l_shape, make_sawtooth, parse_domain,
                       rectangle, sector_polygon, square)
from .kernel_dim import ExcludedAngle, kernel_dim, s0_threshold
from .norms import (McConfig, gagliardo_seminorm, l2_norm, tangential_deriv_l2, weighted_grad_norm,
                    weighted_hess_norm)
from .quadrature import IntegralResult, NonConvergence, integrate_1d, integrate_polygon

__all__ = [
    "__version__",
    "ConsistencyFailure", "CounterexampleRow", "I_eps", "bounded_interior_norms",
    "divergence_table", "dtau_v_on_tooth", "eps_threshold", "trace_norm_gamma",
    "NecasV", "OutOfDomain", "ScalarField", "SectorSingularZ", "parse_field", "product_sine",
    "Polygon", "PolygonError", "SawtoothDomain", "l_shape", "make_sawtooth", "parse_domain",
    "rectangle", "sector_polygon", "square",
    "ExcludedAngle", "kernel_dim", "s0_threshold",
    "McConfig", "gagliardo_seminorm", "l2_norm", "tangential_deriv_l2", "weighted_grad_norm",
    "weighted_hess_norm",
    "IntegralResult", "NonConvergence", "integrate_1d", "integrate_polygon",
]
