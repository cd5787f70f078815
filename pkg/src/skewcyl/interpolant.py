"""The C^2 step psi: 0 near E+, 1 near E-, depending only on Re z.

psi(z) = h(Re z) where h(x) = P((s - x) / (2s)) on [-s, s], P(t) = 6t^5 - 15t^4 + 10t^3,
h = 1 for x <= -s and h = 0 for x >= s.  The default edge s = 7/24 leaves a
margin of 1/24 between the plateaus and the segments [1/3, 1/2], [-1/2, -1/3].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

DEFAULT_EDGE = Fraction(7, 24)


def _quintic(t):
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _quintic_d1(t):
    return 30.0 * t * t * (1.0 - t) ** 2


def _quintic_d2(t):
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)


@dataclass(frozen=True)
class SmoothStep:
    plateau_edge: Fraction = DEFAULT_EDGE

    def __post_init__(self):
        s = Fraction(self.plateau_edge)
        if not 0 < s < Fraction(1, 3):
            raise ValueError("plateau edge must lie in (0, 1/3)")
        object.__setattr__(self, "plateau_edge", s)

    @property
    def s(self) -> float:
        return float(self.plateau_edge)

    def _real_part(self, z):
        if isinstance(z, Rational):
            return z
        if isinstance(z, np.ndarray):
            return np.real(z).astype(float)
        return complex(z).real

    def profile(self, x):
        """h(x), with exact plateau values."""
        if isinstance(x, Rational):
            if x >= self.plateau_edge:
                return 0.0
            if x <= -self.plateau_edge:
                return 1.0
            x = float(x)
        s = self.s
        x = np.asarray(x, dtype=float)
        t = np.clip((s - x) / (2.0 * s), 0.0, 1.0)
        out = np.where(x >= s, 0.0, np.where(x <= -s, 1.0, _quintic(t)))
        return float(out) if out.ndim == 0 else out

    def profile_d1(self, x):
        s = self.s
        x = np.asarray(float(x) if isinstance(x, Rational) else x, dtype=float)
        t = (s - x) / (2.0 * s)
        inside = np.abs(x) < s
        out = np.where(inside, -_quintic_d1(t) / (2.0 * s), 0.0)
        return float(out) if out.ndim == 0 else out

    def profile_d2(self, x):
        s = self.s
        x = np.asarray(float(x) if isinstance(x, Rational) else x, dtype=float)
        t = (s - x) / (2.0 * s)
        inside = np.abs(x) < s
        out = np.where(inside, _quintic_d2(t) / (4.0 * s * s), 0.0)
        return float(out) if out.ndim == 0 else out

    def __call__(self, z):
        return self.profile(self._real_part(z))

    def derivs(self, z):
        """(psi_z, psi_zbar, psi_zzbar) = (h'/2, h'/2, h''/4) at x = Re z."""
        x = self._real_part(z)
        d1 = self.profile_d1(x)
        d2 = self.profile_d2(x)
        psi_z = 0.5 * np.asarray(d1) + 0j
        if np.ndim(psi_z) == 0:
            psi_z = complex(psi_z)
        return psi_z, psi_z, 0.25 * d2

    def c2_bounds(self) -> tuple[float, float]:
        """Closed-form sup |h'| and sup |h''|.

        max P' = P'(1/2) = 15/8 and max |P''| = 10/sqrt(3) at t = (3 -+ sqrt 3)/6,
        rescaled by the chain factors 1/(2s) and 1/(2s)^2.
        """
        s = self.s
        b1 = (15.0 / 8.0) / (2.0 * s)
        b2 = (10.0 / math.sqrt(3.0)) / (4.0 * s * s)
        # round outward so the bounds dominate every floating-point evaluation
        return math.nextafter(b1 * (1 + 4e-16), math.inf), math.nextafter(b2 * (1 + 4e-16), math.inf)


DEFAULT_STEP = SmoothStep()


def eval_psi(z, step: SmoothStep = DEFAULT_STEP):
    return step(z)


def psi_derivs(z, step: SmoothStep = DEFAULT_STEP):
    return step.derivs(z)


def c2_bounds(step: SmoothStep = DEFAULT_STEP) -> tuple[float, float]:
    return step.c2_bounds()
