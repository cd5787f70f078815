"""The fibered obstacle set K = {|w - psi(z)| <= exp(u(z) + |z|^2 + A)} over the unit disc.

Fibers over E+ collapse to the point w = 0, fibers over E- to w = 1; every
other fiber is a closed disc.  Degeneracy is decided from exact membership
in E+-, never from underflow of the radius.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from numbers import Rational
from typing import Callable

import numpy as np

from . import potential
from .interpolant import DEFAULT_STEP, SmoothStep
from .potential import LogPotential

DEFAULT_A = 10.0


def _zc(z) -> complex:
    return complex(float(z)) if isinstance(z, Rational) else complex(z)


@dataclass(frozen=True)
class FiberDescriptor:
    z: complex
    center: complex
    radius: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FiberDescriptor":
        return cls(complex(*d["z"]), complex(*d["center"]), float(d["radius"]), bool(d["degenerate"]))


@dataclass(frozen=True)
class DiscFibration:
    A: float = DEFAULT_A
    potential: LogPotential = field(default_factory=LogPotential)
    step: SmoothStep = DEFAULT_STEP

    def radius_exponent(self, z):
        """phi(z) = u(z) + |z|^2 + A (vectorized; -inf at retained singular points)."""
        zc = np.asarray(_zc(z) if np.ndim(z) == 0 else z, dtype=complex)
        out = potential.partial_sum(zc, self.potential.truncation) + np.abs(zc) ** 2 + self.A
        return float(out) if out.ndim == 0 else out

    def radius(self, z):
        if np.ndim(z) == 0:
            if potential.e_pm_side(z):
                return 0.0
            return math.exp(self.radius_exponent(z))
        return np.exp(self.radius_exponent(z))

    def fiber(self, z) -> FiberDescriptor:
        zc = _zc(z)
        if abs(zc) >= 1.0:
            raise ValueError("z must lie in the open unit disc")
        side = potential.e_pm_side(z)
        if side:
            return FiberDescriptor(zc, complex(0.0 if side > 0 else 1.0), 0.0, True)
        center = complex(self.step(z))
        r = math.exp(self.radius_exponent(zc))
        return FiberDescriptor(zc, center, r, r == 0.0)

    def contains(self, w, z) -> bool:
        f = self.fiber(z)
        return abs(complex(w) - f.center) <= f.radius

    def defining_value(self, w, z) -> float:
        """log|w - psi(z)| - u(z) - |z|^2 - A; positive exactly on the complement of K."""
        f = self.fiber(z)
        dist = abs(complex(w) - f.center)
        if dist == 0.0:
            return -math.inf
        if f.degenerate:
            return math.inf
        return math.log(dist) - self.radius_exponent(f.z)

    def transversal_level(self) -> float:
        return transversal_level(self.A)


def fiber(z, A: float = DEFAULT_A) -> FiberDescriptor:
    return DiscFibration(A).fiber(z)


def contains(w, z, A: float = DEFAULT_A) -> bool:
    return DiscFibration(A).contains(w, z)


def defining_value(w, z, A: float = DEFAULT_A) -> float:
    return DiscFibration(A).defining_value(w, z)


def transversal_level(A: float) -> float:
    """Level N0 such that the line w = N0 clears K over the whole disc.

    psi takes values in [0, 1] and the radius is at most exp(U_max + 1 + A),
    so |N0 - psi| >= N0 - 1 = radius bound + 1.
    """
    return 1.0 + math.exp(potential.weight_sum_bound() + 1.0 + A) + 1.0


def fiber_grid(fib: DiscFibration, resolution: int) -> list[FiberDescriptor]:
    """Fibers over the cell centers of a resolution x resolution grid on [-1,1]^2 that lie in D."""
    xs = -1.0 + (2.0 * np.arange(resolution) + 1.0) / resolution
    out = []
    for y in xs:
        for x in xs:
            z = complex(x, y)
            if abs(z) < 1.0:
                out.append(fib.fiber(z))
    return out


@dataclass(frozen=True)
class GraphObstacle:
    """Obstacle whose fiber over z is the single point c(z); default c(z) = conj z."""

    center_fn: Callable[[complex], complex] = field(default=lambda z: complex(z).conjugate())

    def fiber(self, z) -> FiberDescriptor:
        zc = _zc(z)
        if abs(zc) >= 1.0:
            raise ValueError("z must lie in the open unit disc")
        return FiberDescriptor(zc, complex(self.center_fn(zc)), 0.0, True)

    def contains(self, w, z) -> bool:
        return complex(w) == self.fiber(z).center

    def conj_derivative(self, z, step: float = 1e-6) -> complex:
        """Central-difference d/d(conj z) of the center map; nonzero means not holomorphic."""
        zc = _zc(z)
        c = self.center_fn
        dx = (c(zc + step) - c(zc - step)) / (2 * step)
        dy = (c(zc + 1j * step) - c(zc - 1j * step)) / (2 * step)
        return 0.5 * (dx + 1j * dy)


def boundary_point(fd: FiberDescriptor, theta: float) -> complex:
    return fd.center + fd.radius * cmath.exp(1j * theta)
