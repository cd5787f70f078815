"""Schwarzian derivative on 3-jets, Moebius maps, and the change to the log chart."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable


class RichardsonError(ArithmeticError):
    """Finite-difference derivatives failed their step-halving consistency check."""


@dataclass(frozen=True)
class Jet3:
    """Value and first three derivatives of a holomorphic map at p."""

    p: complex
    f0: complex
    f1: complex
    f2: complex
    f3: complex

    def compose(self, inner: "Jet3") -> "Jet3":
        """Jet of self o inner at inner.p; self must be taken at inner.f0 (Faa di Bruno)."""
        g1, g2, g3 = inner.f1, inner.f2, inner.f3
        return Jet3(
            inner.p,
            self.f0,
            self.f1 * g1,
            self.f2 * g1 ** 2 + self.f1 * g2,
            self.f3 * g1 ** 3 + 3 * self.f2 * g1 * g2 + self.f1 * g3,
        )


def exp_jet(p: complex) -> Jet3:
    e = cmath.exp(p)
    return Jet3(p, e, e, e, e)


def log_jet(p: complex) -> Jet3:
    p = complex(p)
    return Jet3(p, cmath.log(p), 1 / p, -1 / p ** 2, 2 / p ** 3)


def identity_jet(p: complex) -> Jet3:
    return Jet3(p, p, 1, 0, 0)


@dataclass(frozen=True)
class Mobius:
    """zeta -> (a zeta + b)/(c zeta + d), stored with ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if det == 0:
            raise ValueError("degenerate Moebius map (ad - bc = 0)")
        s = cmath.sqrt(det)
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v / s)

    def __call__(self, zeta):
        zeta = complex(zeta)
        den = self.c * zeta + self.d
        if den == 0:
            return complex(math.inf, 0)
        return (self.a * zeta + self.b) / den

    def compose(self, other: "Mobius") -> "Mobius":
        """self o other."""
        return Mobius(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                      self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def jet(self, p) -> Jet3:
        p = complex(p)
        q = self.c * p + self.d
        if q == 0:
            raise ValueError("p is the pole of the map")
        return Jet3(p, self(p), 1 / q ** 2, -2 * self.c / q ** 3, 6 * self.c ** 2 / q ** 4)

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_three_points(cls, p, q) -> "Mobius":
        """The map sending p[i] to q[i], i = 0, 1, 2 (finite, distinct points)."""
        return _cross_ratio_map(q).inverse().compose(_cross_ratio_map(p))

    @classmethod
    def from_jet(cls, jet: Jet3) -> "Mobius":
        """The unique Moebius map agreeing with the 2-jet (f0, f1, f2) at jet.p.

        M(p + t) = f0 + f1 t / (1 - k t) with k = f2 / (2 f1).
        """
        if jet.f1 == 0:
            raise ValueError("f1 = 0: no Moebius map matches this jet")
        k = jet.f2 / (2 * jet.f1)
        a = jet.f1 - jet.f0 * k
        return cls(a, jet.f0 - a * jet.p, -k, 1 + k * jet.p)


def _cross_ratio_map(p) -> Mobius:
    # sends p0 -> 0, p1 -> 1, p2 -> inf
    p0, p1, p2 = (complex(v) for v in p)
    return Mobius(p1 - p2, -p0 * (p1 - p2), p1 - p0, -p2 * (p1 - p0))


def chordal(u: complex, v: complex) -> float:
    """Chordal distance on the Riemann sphere (points at infinity allowed)."""
    u, v = complex(u), complex(v)
    ui, vi = cmath.isinf(u), cmath.isinf(v)
    if ui and vi:
        return 0.0
    if ui:
        return 2.0 / math.sqrt(1 + abs(v) ** 2)
    if vi:
        return 2.0 / math.sqrt(1 + abs(u) ** 2)
    return 2.0 * abs(u - v) / math.sqrt((1 + abs(u) ** 2) * (1 + abs(v) ** 2))


def schwarzian(jet: Jet3) -> complex:
    if jet.f1 == 0:
        raise ZeroDivisionError("f'(p) = 0: Schwarzian undefined at a critical point")
    r = jet.f2 / jet.f1
    return jet.f3 / jet.f1 - 1.5 * r * r


def _stencil_jet(f, p: complex, h: float):
    fm3, fm2, fm1, f0, fp1, fp2, fp3 = (f(p + k * h) for k in range(-3, 4))
    d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)
    d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
    d3 = (-fp3 + 8 * fp2 - 13 * fp1 + 13 * fm1 - 8 * fm2 + fm3) / (8 * h ** 3)
    scale = max(abs(v) for v in (fm3, fm2, fm1, f0, fp1, fp2, fp3))
    return Jet3(p, f0, d1, d2, d3), scale


def jet_fd(f: Callable[[complex], complex], p, step: float = 1e-2) -> tuple[Jet3, float]:
    """Fourth-order central-difference 3-jet of a holomorphic f along the real direction.

    Returns the jet at step h/2 and an error estimate for its Schwarzian.
    Raises RichardsonError when the h/4 result disagrees with the h/2 result
    by more than 10x that estimate.
    """
    p = complex(p)
    try:
        jets = [_stencil_jet(f, p, step / k) for k in (1, 2, 4)]
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise RichardsonError(f"stencil left the domain of f: {exc}") from exc
    (j1, _), (j2, sc2), (j4, sc4) = jets
    s1, s2, s4 = (schwarzian(j) for j in (j1, j2, j4))
    # rounding floor for the third derivative at the finest step, relative to f'
    noise = 64 * 2.2e-16 * max(sc2, sc4) / ((step / 4) ** 3 * abs(j2.f1))
    err = max(abs(s1 - s2), noise)
    if abs(s2 - s4) > 10 * err:
        raise RichardsonError(f"inconsistent finite differences: |dS| = {abs(s2 - s4):.3e}, estimate {err:.3e}")
    return j2, err


def schwarzian_fd(f: Callable[[complex], complex], p, step: float = 1e-2) -> complex:
    jet, _ = jet_fd(f, p, step)
    return schwarzian(jet)


def cocycle(Sf_at_gp: complex, g_jet: Jet3, Sg_at_p: complex) -> complex:
    """S(f o g)(p) = Sf(g(p)) g'(p)^2 + Sg(p)."""
    if g_jet.f1 == 0:
        raise ZeroDivisionError("g'(p) = 0")
    return Sf_at_gp * g_jet.f1 ** 2 + Sg_at_p


def schwarzian_in_log_chart(F_jet_in_w: Jet3) -> complex:
    """Schwarzian of zeta -> F(e^zeta) at zeta0 = log w0: w0^2 SF(w0) - 1/2."""
    w0 = F_jet_in_w.p
    if w0 == 0:
        raise ValueError("w0 = 0 has no log coordinate")
    return w0 * w0 * schwarzian(F_jet_in_w) - 0.5
