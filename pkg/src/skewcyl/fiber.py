"""Conformal charts on fibers of the complement and continuation of log w.

A non-degenerate fiber C minus a closed disc maps onto the punctured unit
disc by m = r/(w - c); a degenerate fiber C minus {c} maps onto C minus {0}
by m = 1/(w - c).  The universal cover of either is coordinatized by zeta
with e^zeta = m, and the deck group acts by zeta -> zeta + 2 pi i k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .brset import FiberDescriptor

TWO_PI_I = 2j * math.pi
MAX_ARG_STEP = math.pi / 2
# points this close (relative) to the obstacle circle count as on it
BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True)
class FiberChart:
    descriptor: FiberDescriptor

    @property
    def degenerate(self) -> bool:
        return self.descriptor.degenerate

    def to_punctured_disc(self, w) -> complex:
        c, r = self.descriptor.center, self.descriptor.radius
        d = complex(w) - c
        if self.degenerate:
            if d == 0:
                raise ValueError("w is the removed point of the fiber")
            return 1.0 / d
        if abs(d) <= r * (1.0 + BOUNDARY_RTOL):
            raise ValueError("w lies in the closed obstacle disc")
        return r / d

    def from_punctured_disc(self, m) -> complex:
        m = complex(m)
        c, r = self.descriptor.center, self.descriptor.radius
        if m == 0:
            raise ValueError("m = 0 is the puncture")
        if self.degenerate:
            return c + 1.0 / m
        if abs(m) >= 1.0 - BOUNDARY_RTOL:
            raise ValueError("m must satisfy 0 < |m| < 1")
        return c + r / m

    def lift(self, w, branch: int = 0) -> complex:
        """Covering coordinate zeta over w on the sheet `branch`."""
        return cmath.log(self.to_punctured_disc(w)) + TWO_PI_I * branch

    def project(self, zeta) -> complex:
        return self.from_punctured_disc(cmath.exp(complex(zeta)))


def to_punctured_disc(chart: FiberChart, w) -> complex:
    return chart.to_punctured_disc(w)


def from_punctured_disc(chart: FiberChart, m) -> complex:
    return chart.from_punctured_disc(m)


def deck(zeta: complex, k: int = 1) -> complex:
    return complex(zeta) + TWO_PI_I * k


@dataclass(frozen=True)
class PathPolyline:
    vertices: tuple[complex, ...]

    def __init__(self, vertices):
        vs = tuple(complex(v) for v in vertices)
        if len(vs) < 2:
            raise ValueError("a path needs at least two vertices")
        object.__setattr__(self, "vertices", vs)

    @property
    def closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    def shifted(self, c: complex) -> "PathPolyline":
        return PathPolyline([v - c for v in self.vertices])

    def concat(self, other: "PathPolyline") -> "PathPolyline":
        if self.vertices[-1] != other.vertices[0]:
            raise ValueError("paths do not join")
        return PathPolyline(self.vertices + other.vertices[1:])

    def refined(self) -> "PathPolyline":
        """Insert the midpoint of every segment."""
        out = [self.vertices[0]]
        for p, q in zip(self.vertices, self.vertices[1:]):
            out += [0.5 * (p + q), q]
        return PathPolyline(out)

    def to_json(self) -> list:
        return [[v.real, v.imag] for v in self.vertices]

    @classmethod
    def from_json(cls, data) -> "PathPolyline":
        return cls([complex(re, im) for re, im in data])


def circle(center: complex = 0, radius: float = 0.5, turns: int = 1, n: int = 64,
           start_angle: float = 0.0) -> PathPolyline:
    """Closed polygon approximating a circle; negative turns run clockwise."""
    k = abs(turns) * n
    sign = 1 if turns >= 0 else -1
    pts = [center + radius * cmath.exp(1j * (start_angle + sign * 2 * math.pi * j / n))
           for j in range(k)]
    return PathPolyline(pts + [pts[0]])


def _segment_hits_origin(p: complex, q: complex) -> bool:
    d = q - p
    if d == 0:
        return p == 0
    cross = p.real * d.imag - p.imag * d.real
    scale = abs(p) + abs(q)
    if abs(cross) > 1e-15 * scale * abs(d):
        return False
    t = -(p.real * d.real + p.imag * d.imag) / (abs(d) ** 2)
    return 0.0 <= t <= 1.0


def _segment_distance(p: complex, q: complex) -> float:
    """Distance from 0 to the segment [p, q]."""
    d = q - p
    if d == 0:
        return abs(p)
    t = min(1.0, max(0.0, -(p.real * d.real + p.imag * d.imag) / abs(d) ** 2))
    return abs(p + t * d)


def _arg_increment(p: complex, q: complex, depth: int = 0) -> float:
    step = cmath.phase(q / p)
    if abs(step) < MAX_ARG_STEP:
        return step
    if depth > 60:
        raise ValueError("segment subdivision did not converge")
    mid = 0.5 * (p + q)
    return _arg_increment(p, mid, depth + 1) + _arg_increment(mid, q, depth + 1)


def continue_log(path: PathPolyline, initial_branch: complex) -> tuple[complex, complex]:
    """Analytically continue log along the polyline; returns (final value, increment).

    Segments are bisected until each principal argument step is below pi/2.
    """
    vs = path.vertices
    b = complex(initial_branch)
    if any(v == 0 for v in vs):
        raise ValueError("path passes through 0")
    if abs(cmath.exp(b) - vs[0]) > 1e-10 * max(1.0, abs(vs[0])):
        raise ValueError("initial branch is inconsistent with the first vertex")
    arg = b.imag
    for p, q in zip(vs, vs[1:]):
        if _segment_hits_origin(p, q):
            raise ValueError("path passes through 0")
        arg += _arg_increment(p, q)
    final = complex(math.log(abs(vs[-1])), arg)
    return final, final - b


@dataclass(frozen=True)
class MonodromyResult:
    increment: complex
    winding: int

    def to_dict(self) -> dict:
        return {"increment": [self.increment.real, self.increment.imag], "winding": self.winding}


def monodromy(loop: PathPolyline, around: complex = 0) -> MonodromyResult:
    """Log monodromy of a closed loop about the point `around` (default 0)."""
    if not loop.closed:
        raise ValueError("monodromy needs a closed loop")
    shifted = loop.shifted(around) if around != 0 else loop
    v0 = shifted.vertices[0]
    _, inc = continue_log(shifted, cmath.log(v0))
    return MonodromyResult(inc, int(round((inc / TWO_PI_I).real)))


def crossing_winding(loop: PathPolyline, around: complex = 0) -> int:
    """Winding number by signed crossings of the ray to +infinity (independent of log)."""
    vs = np.array(loop.vertices) - around
    w = 0
    for p, q in zip(vs, vs[1:]):
        if p.imag <= 0 < q.imag or q.imag <= 0 < p.imag:
            x = p.real + (0 - p.imag) * (q.real - p.real) / (q.imag - p.imag)
            if x > 0:
                w += 1 if q.imag > p.imag else -1
    return w


@dataclass(frozen=True)
class ChartDichotomy:
    """How log w behaves on one fiber along one loop.

    contractible: the loop is null-homotopic in the fiber.
    branch_witness: contractible, yet log w picks up a nonzero increment,
    so log w is multivalued on the universal cover of the fiber.
    cover_consistent: the log winding equals the fiber winding along this loop.
    """

    descriptor: FiberDescriptor
    log_monodromy: MonodromyResult
    fiber_winding: int
    contractible: bool
    branch_witness: bool
    cover_consistent: bool

    def to_dict(self) -> dict:
        return {
            "fiber": self.descriptor.to_dict(),
            "log_increment": [self.log_monodromy.increment.real, self.log_monodromy.increment.imag],
            "log_winding": self.log_monodromy.winding,
            "fiber_winding": self.fiber_winding,
            "contractible": self.contractible,
            "branch_witness": self.branch_witness,
            "cover_consistent": self.cover_consistent,
        }


def log_chart_dichotomy(descriptor: FiberDescriptor, loop: PathPolyline) -> ChartDichotomy:
    """Compare the log-w monodromy of a loop with its homotopy class in the fiber.

    The fiber is C minus one disc or point, so the class of a loop is its
    winding about the obstacle center.  log w descends to the universal cover
    of the fiber iff its monodromy is a function of that class.
    """
    c, r = descriptor.center, descriptor.radius
    if any(_segment_distance(p - c, q - c) <= r for p, q in zip(loop.vertices, loop.vertices[1:])):
        raise ValueError("loop meets the obstacle")
    log_m = monodromy(loop, 0)
    fw = monodromy(loop, c).winding
    contractible = fw == 0
    witness = contractible and log_m.winding != 0
    return ChartDichotomy(descriptor, log_m, fw, contractible, witness, log_m.winding == fw)
