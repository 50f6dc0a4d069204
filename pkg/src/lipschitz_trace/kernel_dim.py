"""Dimension of the harmonic kernel of a polygon from its corner angles.

For a polygon with interior angles ``omega_j`` and ``alpha_j = pi/omega_j``
each corner contributes ``nu_s(omega)`` singular harmonic functions: the
largest integer strictly below ``(1 + s)/alpha``.  The count is only valid
when no angle hits the excluded set ``{k pi/(s+1) : k = 1..s}`` (integer
``s >= 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .geometry import AngleSpectrum

__all__ = [
    "ExcludedAngle",
    "KernelReport",
    "KernelClass",
    "nu",
    "kernel_dim",
    "reflex_count_dim",
    "Threshold",
    "s0_threshold",
    "polyhedron_kernel_class",
]

# relative slack when comparing an angle against the excluded set
_ANGLE_RTOL = 1e-12


class ExcludedAngle(ValueError):
    """An angle lies on the excluded set, so the dimension formula does not apply."""

    def __init__(self, msg: str, angle: float, s: float):
        super().__init__(msg)
        self.angle = angle
        self.s = s


@dataclass(frozen=True)
class KernelReport:
    """Per-corner counts and their total; ``mode`` names the counting rule."""

    s: float
    omegas: tuple[float, ...]
    per_corner: tuple[int, ...]
    total_dim: int
    excluded_angle_hit: float | None = None
    mode: str = "formula"

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "omegas": list(self.omegas),
            "per_corner": list(self.per_corner),
            "total_dim": self.total_dim,
            "excluded": self.excluded_angle_hit,
            "mode": self.mode,
        }


class KernelClass(str, Enum):
    TRIVIAL = "trivial"
    INFINITE = "infinite"


def _largest_int_below(x: float) -> int:
    """Largest integer strictly below ``x``, floored at 0."""
    if x <= 0.0:
        return 0
    c = math.ceil(x)
    # exact-integer guard: x equal to an integer up to rounding counts as that integer
    r = round(x)
    if abs(x - r) <= 4 * math.ulp(max(abs(x), 1.0)):
        c = r
    return max(0, c - 1)


def nu(s: float, omega: float) -> int:
    """Number of singular exponents of one corner: largest integer ``< (1+s) omega/pi``.

    Examples
    --------
    >>> nu(0.0, 3 * math.pi / 2)
    1
    >>> nu(0.0, math.pi / 2)
    0
    """
    if not 0.0 < omega < 2.0 * math.pi:
        raise ValueError(f"omega must lie in (0, 2pi), got {omega!r}")
    if s < -0.5:
        raise ValueError(f"s must be >= -1/2, got {s!r}")
    return _largest_int_below((1.0 + s) * omega / math.pi)


def _spectrum(spectrum) -> AngleSpectrum:
    if isinstance(spectrum, AngleSpectrum):
        return spectrum
    if hasattr(spectrum, "spectrum"):
        return spectrum.spectrum
    return AngleSpectrum.from_angles(list(spectrum))


def _excluded_hit(omegas: Sequence[float], s: float) -> float | None:
    if s < 1 or s != int(s):
        return None
    n = int(s)
    for w in omegas:
        for k in range(1, n + 1):
            target = k * math.pi / (n + 1)
            if abs(w - target) <= _ANGLE_RTOL * target:
                return w
    return None


def kernel_dim(spectrum, s: float) -> KernelReport:
    """Dimension of the kernel at order ``s`` summed over all corners.

    ``spectrum`` may be an :class:`AngleSpectrum`, a polygon, or a list of
    angles in radians.

    Raises
    ------
    ExcludedAngle
        For integer ``s >= 1`` when some angle equals ``k pi/(s+1)``.
    """
    if s < -0.5:
        raise ValueError(f"s must be >= -1/2, got {s!r}")
    sp = _spectrum(spectrum)
    hit = _excluded_hit(sp.omegas, s)
    if hit is not None:
        raise ExcludedAngle(
            f"angle {hit!r} lies in the excluded set for s={s}; the dimension formula does not apply",
            hit, s)
    per = tuple(nu(s, w) for w in sp.omegas)
    return KernelReport(float(s), tuple(float(w) for w in sp.omegas), per, sum(per))


def reflex_count_dim(spectrum, s: float) -> KernelReport:
    """Literal low-range count: number of corners with ``omega > pi``.

    Offered for comparison with :func:`kernel_dim` on ``-1/2 <= s <= 0``,
    where the two differ for angles between ``pi`` and ``pi/(1+s)``.
    """
    if not -0.5 <= s <= 0.0:
        raise ValueError("the reflex count is stated for -1/2 <= s <= 0 only")
    sp = _spectrum(spectrum)
    per = tuple(int(w > math.pi) for w in sp.omegas)
    return KernelReport(float(s), tuple(float(w) for w in sp.omegas), per, sum(per), mode="reflex")


@dataclass(frozen=True)
class Threshold:
    value: float
    raw: float
    clamped: bool

    def __float__(self) -> float:
        return self.value


def s0_threshold(spectrum) -> Threshold:
    """``max(0, 1 - alpha_J)`` with ``alpha_J`` belonging to the largest angle.

    The raw value is negative for convex polygons, where the threshold is
    not meaningful; it is clamped to 0 and ``clamped`` is set.
    """
    sp = _spectrum(spectrum)
    if len(sp.omegas) == 0:
        raise ValueError("empty spectrum")
    raw = 1.0 - math.pi / sp.largest
    return Threshold(max(0.0, raw), raw, raw < 0.0)


def polyhedron_kernel_class(edge_alphas: Sequence[float], s: float) -> KernelClass:
    """Trivial kernel iff every edge exponent satisfies ``alpha >= 1 - s``.

    Exact rational comparison is used when inputs are :class:`Fraction`.
    """
    if len(edge_alphas) == 0:
        raise ValueError("need at least one edge")
    for a in edge_alphas:
        if not a > Fraction(1, 2):
            raise ValueError(f"edge exponents must exceed 1/2 (Lipschitz edges), got {a!r}")
    lim = 1 - s
    return KernelClass.INFINITE if any(a < lim for a in edge_alphas) else KernelClass.TRIVIAL
