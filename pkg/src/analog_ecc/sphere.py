"""Redundancy-three codes from latitude rings on the upper unit hemisphere.

Ring 0 is the north pole.  Ring ``i`` for ``1 <= i < t`` sits at polar angle
``pi*i/(2t)`` and carries ``4i`` evenly spaced points.  The equator (ring
``t``) carries ``2t`` points on a half circle, since antipodal columns would be
parallel.  This gives ``2t^2 + 1`` columns with pairwise coherence at most
``cos(pi/(2t))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .code import AnalogCode
from .errors import DomainError

MIN_RINGS = 4


@dataclass(frozen=True)
class SpherePoint:
    phi: float
    theta: float

    @property
    def xyz(self) -> np.ndarray:
        s = math.sin(self.phi)
        return np.array([s * math.cos(self.theta), s * math.sin(self.theta), math.cos(self.phi)])


@dataclass(frozen=True)
class OmegaFamily:
    t: int
    rings: tuple

    @property
    def points(self) -> list:
        return [p for ring in self.rings for p in ring]

    def matrix(self, count: int | None = None) -> np.ndarray:
        """``3 x count`` matrix of the first ``count`` points in ring-major order."""
        pts = self.points
        if count is None:
            count = len(pts)
        return np.column_stack([p.xyz for p in pts[:count]])

    def __len__(self):
        return sum(len(ring) for ring in self.rings)


def _check_t(t: int) -> int:
    if int(t) != t or t < MIN_RINGS:
        raise DomainError(f"the ring count t must be an integer > 3, got {t}")
    return int(t)


def build_omega(t: int) -> OmegaFamily:
    t = _check_t(t)
    rings = [(SpherePoint(0.0, 0.0),)]
    for i in range(1, t + 1):
        phi = math.pi * i / (2 * t)
        count = 4 * i if i < t else 2 * t
        # angles from the closed forms, never accumulated
        rings.append(tuple(SpherePoint(phi, math.pi * j / (2 * i)) for j in range(count)))
    return OmegaFamily(t=t, rings=tuple(rings))


def point_count(t: int) -> int:
    return 2 * t * t + 1


def construct_code(t: int) -> AnalogCode:
    """The ``[2t^2 + 1, 2t^2 - 2]`` code whose parity-check columns are all ring points."""
    omega = build_omega(t)
    return AnalogCode(omega.matrix(), label=f"sphere-t{omega.t}")


def rings_for_length(n: int) -> int:
    """Smallest ``t`` with ``2t^2 + 1 >= n``."""
    return math.ceil(math.sqrt((n - 1) / 2))


def construct_code_for_length(n: int) -> AnalogCode:
    """Length-``n`` code using the first ``n`` ring points, pole first.

    ``t`` is ``ceil(sqrt((n - 1) / 2))``; lengths that would need ``t < 4``
    (``n < 20``) are rejected.
    """
    if int(n) != n or n <= 3:
        raise DomainError(f"code length must be an integer > 3, got {n}")
    n = int(n)
    t = rings_for_length(n)
    if t < MIN_RINGS:
        raise DomainError(
            f"n = {n} gives t = {t}, but the ring construction needs t > 3 (n >= 20)"
        )
    omega = build_omega(t)
    label = f"sphere-t{t}" if n == len(omega) else f"sphere-n{n}-t{t}"
    return AnalogCode(omega.matrix(n), label=label)


def construction_gamma_bound(n: int) -> float:
    """``2n / sin(pi / (2 ceil(sqrt((n-1)/2))))``, the bound for any length ``n``."""
    t = rings_for_length(n)
    return 2.0 * n / math.sin(math.pi / (2 * t))


def construction_delta(n: int) -> float:
    """Outlier bound ``(cot(pi / (4t)) + 1) n`` of the decoder for any length ``n``."""
    t = rings_for_length(n)
    return (1.0 / math.tan(math.pi / (4 * t)) + 1.0) * n


def exact_fit_gamma_bound(n: float) -> float:
    """``2n / sin(pi / sqrt(2(n - 1)))``, the bound when ``n = 2t^2 + 1``."""
    return 2.0 * n / math.sin(math.pi / math.sqrt(2.0 * (n - 1)))


def exact_fit_delta(n: float) -> float:
    """``(cot(pi / (2 sqrt(2(n - 1)))) + 1) n``, the outlier bound when ``n = 2t^2 + 1``."""
    return (1.0 / math.tan(math.pi / (2.0 * math.sqrt(2.0 * (n - 1)))) + 1.0) * n


ASYMPTOTIC_CONSTANT = 2.0 * math.sqrt(2.0) / math.pi
