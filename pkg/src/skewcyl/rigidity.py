"""Identity-theorem bounds on E+, the periodicity obstruction on E- fibers,
and the end-to-end nonuniformizability certificate for a candidate family.

A candidate family is a map f(z, zeta): for each base point z, a function
on the fiber written in the log chart zeta = ln w.  If the family
uniformized the cylinder, f(z, .) would be Moebius in zeta over every point
of E+ (there ln w is a genuine chart of the fiber's cover), so its
Schwarzian s(z) would vanish on E+ and hence everywhere, by holomorphy in z
and the accumulation of E+ at 1/2.  Over E- the loop around w = 0 is
contractible in the fiber while zeta shifts by 2 pi i, so a single-valued f
cannot be Moebius in zeta there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import brset, fiber
from .potential import a_n
from .schwarzian import Jet3, Mobius, chordal, jet_fd, schwarzian

SCHEMA_VERSION = 1
CONTRADICTION = "contradiction-found"
NONVANISHING = "schwarzian-nonvanishing-on-E+"
INCONCLUSIVE = "inconclusive"
MOBIUS_MATCH_TOL = 1e-8
DEFECT_FLOOR = 1e-12


def _check_disc(z) -> complex:
    zc = complex(z)
    if abs(zc) >= 1.0:
        raise ValueError("z must lie in the open unit disc")
    return zc


def blaschke_bound(z, N: int) -> float:
    """prod_{n<=N} |(z - a_n)/(1 - a_n z)| * |(z - 1/2)/(1 - z/2)|.

    Bounds |h(z)| / sup|h| for bounded holomorphic h on D vanishing at 1/2
    and at a_1..a_N.
    """
    zc = _check_disc(z)
    if N < 0:
        raise ValueError("N must be >= 0")
    out = abs((zc - 0.5) / (1 - 0.5 * zc))
    for n in range(1, N + 1):
        a = n / (2 * n + 1)
        out *= abs((zc - a) / (1 - a * zc))
    return out


def vanishing_propagation(sup_bound: float, N: int, z_target) -> float:
    if sup_bound < 0:
        raise ValueError("sup bound must be nonnegative")
    return sup_bound * blaschke_bound(z_target, N)


def _rank(rows: list[list[Fraction]]) -> int:
    m = [row[:] for row in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for i in range(rank + 1, len(m)):
            if m[i][col] != 0:
                f = m[i][col] / p
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def poly_identity_check(d: int) -> bool:
    """True iff the only polynomial of degree <= d vanishing at a_1..a_{d+1} is zero (exact)."""
    if not 0 <= d <= 50:
        raise ValueError("degree must lie in [0, 50]")
    nodes = [a_n(n) for n in range(1, d + 2)]
    rows = [[x ** j for j in range(d + 1)] for x in nodes]
    return _rank(rows) == d + 1


CANONICAL_POINTS = (0j, 1 + 0j, 1j)


@dataclass(frozen=True)
class PeriodicityDefect:
    points: tuple[complex, ...]
    euclidean: tuple[float, ...]
    chordal: tuple[float, ...]
    max_defect: float


def mobius_periodicity_defect(M: Mobius, shift: complex = 2j * math.pi) -> PeriodicityDefect:
    """Compare M(zeta + shift) with M(zeta) at zeta in {0, 1, i}.

    max_defect is the chordal maximum; it is positive for every Moebius M
    because agreement at three points would force M(zeta + shift) = M(zeta).
    """
    eu, ch = [], []
    for p in CANONICAL_POINTS:
        u, v = M(p + shift), M(p)
        ch.append(chordal(u, v))
        eu.append(abs(u - v) if not (cmath.isinf(u) or cmath.isinf(v)) else math.inf)
    return PeriodicityDefect(CANONICAL_POINTS, tuple(eu), tuple(ch), max(ch))


# --- candidate families ------------------------------------------------------

@dataclass(frozen=True)
class CandidateFamily:
    """f(z, zeta) on the fiber over z in the log chart, with an optional closed-form zeta-jet."""

    name: str
    evaluator: Callable[[complex, complex], complex]
    jet: Callable[[complex, complex], Jet3] | None = None
    claimed_holomorphic: bool = True

    def __call__(self, z, zeta) -> complex:
        return self.evaluator(complex(z), complex(zeta))

    def jet_at(self, z, zeta0, step: float = 1e-2) -> Jet3:
        if self.jet is not None:
            return self.jet(complex(z), complex(zeta0))
        j, _ = jet_fd(lambda t: self.evaluator(complex(z), t), zeta0, step)
        return j


def _q(z: complex) -> complex:
    return cmath.exp(z)


def _log_mobius(z: complex) -> Mobius:
    q = _q(z)
    return Mobius(1, q, 1, -q)


def moebius_in_log() -> CandidateFamily:
    """f(z, zeta) = (zeta + e^z)/(zeta - e^z): Moebius in the log chart on every fiber."""
    return CandidateFamily(
        "moebius-in-log",
        lambda z, t: _log_mobius(z)(t),
        lambda z, t: _log_mobius(z).jet(t),
    )


def _branch_log_jet(zeta: complex) -> Jet3:
    # g(zeta) = log(e^zeta - 1); derivatives in zeta, with w = e^zeta
    w = cmath.exp(zeta)
    v = w - 1
    return Jet3(zeta, cmath.log(v), w / v, -w / v ** 2, w * (w + 1) / v ** 3)


def branch_adapted() -> CandidateFamily:
    """f(z, zeta) = M_z(log(e^zeta - 1)): single-valued on fibers over E-.

    The branch point sits at w = 1 for every z; a holomorphic branch point
    equal to 1 on E- is identically 1.
    """
    return CandidateFamily(
        "branch-adapted",
        lambda z, t: _log_mobius(z)(cmath.log(cmath.exp(t) - 1)),
        lambda z, t: _log_mobius(z).jet(cmath.log(cmath.exp(t) - 1)).compose(_branch_log_jet(t)),
    )


def perturb_conj(family: CandidateFamily, size: float, anchor: complex) -> CandidateFamily:
    """Add size * conj(z) * (zeta - anchor)^2, spoiling holomorphy in z."""
    base_jet = family.jet

    def ev(z, t):
        return family.evaluator(z, t) + size * z.conjugate() * (t - anchor) ** 2

    def jet(z, t):
        j = base_jet(z, t) if base_jet else family.jet_at(z, t)
        c = size * z.conjugate()
        return Jet3(j.p, j.f0 + c * (t - anchor) ** 2, j.f1 + 2 * c * (t - anchor), j.f2 + 2 * c, j.f3)

    return CandidateFamily(f"{family.name}+conj({size:g})", ev, jet, claimed_holomorphic=False)


def canned_family(name: str, A: float = brset.DEFAULT_A) -> CandidateFamily:
    if name == "moebius-in-log":
        return moebius_in_log()
    if name == "branch-adapted":
        return branch_adapted()
    if name == "conj-perturbed":
        anchor = complex(math.log(brset.transversal_level(A)))
        return perturb_conj(moebius_in_log(), 1e-3, anchor)
    raise KeyError(f"unknown family {name!r}; choose from {', '.join(CANNED_FAMILIES)}")


CANNED_FAMILIES = ("moebius-in-log", "branch-adapted", "conj-perturbed")


# --- certificate -------------------------------------------------------------

def _c2(v: complex) -> list[float]:
    return [v.real, v.imag]


@dataclass(frozen=True)
class CertificateReport:
    family: str
    A: float
    N: int
    basepoint_w: float
    zeta0: complex
    e_plus_points: tuple[float, ...]
    s_values: tuple[complex, ...]
    s_max_e_plus: float
    holomorphy_residual: float
    sup_bound_estimate: float
    e_minus_points: tuple[float, ...]
    propagated_bounds: tuple[float, ...]
    mobius_match_residual: float
    monodromy_increment: complex
    loop_contractible: bool
    monodromy_defect: float
    family_periodicity_defect: float
    tol_zero: float
    tol_cr: float
    verdict: str
    notes: tuple[str, ...] = ()
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        d = asdict(self)
        d["zeta0"] = _c2(self.zeta0)
        d["s_values"] = [_c2(s) for s in self.s_values]
        d["monodromy_increment"] = _c2(self.monodromy_increment)
        for k in ("e_plus_points", "e_minus_points", "propagated_bounds", "notes"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CertificateReport":
        d = dict(d)
        d["zeta0"] = complex(*d["zeta0"])
        d["s_values"] = tuple(complex(*s) for s in d["s_values"])
        d["monodromy_increment"] = complex(*d["monodromy_increment"])
        for k in ("e_plus_points", "e_minus_points", "propagated_bounds", "notes"):
            d[k] = tuple(d[k])
        return cls(**d)


def sup_grid(n_radii: int = 10, n_angles: int = 10, rmax: float = 0.95) -> list[complex]:
    """Polar grid of n_radii * n_angles points inside the disc."""
    return [rmax * (i + 0.5) / n_radii * cmath.exp(2j * math.pi * j / n_angles)
            for i in range(n_radii) for j in range(n_angles)]


def conj_derivative(g: Callable[[complex], complex], z: complex, h: float = 1e-4) -> complex:
    """Central-difference d/d(conj z) of g; O(h^2) for holomorphic g."""
    gx = (g(z + h) - g(z - h)) / (2 * h)
    gy = (g(z + 1j * h) - g(z - 1j * h)) / (2 * h)
    return 0.5 * (gx + 1j * gy)


def run_certificate(family: CandidateFamily, N: int = 25, tol_zero: float = 1e-9,
                    tol_cr: float = 1e-6, A: float = brset.DEFAULT_A,
                    basepoint_w: float | None = None,
                    e_minus: tuple[Fraction, ...] = (Fraction(-1, 3),)) -> CertificateReport:
    """Run the obstruction pipeline on one candidate family.

    1. s(z): Schwarzian of f(z, .) at zeta0 = log(basepoint), basepoint on
       the transversal line w = N0 by default.
    2. Holomorphy residual in z of s and of f(., zeta0 + 1); must be < tol_cr.
    3. If |s| <= tol_zero on a_1..a_N, propagate through the Blaschke bound
       with a grid estimate of sup|s|.
    4. Over E-: fit the Moebius map to the 2-jet of f, check it at a fourth
       point, and measure its defect under the deck shift of a loop around
       w = 0 that is contractible in the fiber.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    w0 = brset.transversal_level(A) if basepoint_w is None else float(basepoint_w)
    if w0 <= 0:
        raise ValueError("basepoint must be a positive real level")
    zeta0 = complex(math.log(w0))
    notes = ["sup|s| is a grid estimate, not a proven bound"]

    def s_at(z):
        return schwarzian(family.jet_at(z, zeta0))

    e_plus = [float(a_n(n)) for n in range(1, N + 1)]
    try:
        s_vals = [s_at(z) for z in e_plus]
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        raise ValueError(f"family not evaluable on E+ fibers: {exc}") from exc
    s_max = max(abs(s) for s in s_vals)

    grid = sup_grid()
    minus_pts = [complex(float(z)) for z in e_minus]
    probe = [complex(z) for z in e_plus] + minus_pts + grid
    residual = 0.0
    for z in probe:
        residual = max(residual,
                       abs(conj_derivative(s_at, z)),
                       abs(conj_derivative(lambda x: family(x, zeta0 + 1), z)))
    sup_s = max([abs(s_at(z)) for z in grid] + [s_max])
    propagated = tuple(vanishing_propagation(sup_s, N, z) for z in minus_pts)

    # E- stage on the first E- sample
    zm = e_minus[0]
    desc = brset.DiscFibration(A).fiber(zm)
    dich = fiber.log_chart_dichotomy(desc, fiber.circle(0, 0.5))
    shift = dich.log_monodromy.increment
    jm = family.jet_at(complex(float(zm)), zeta0)
    M = Mobius.from_jet(jm)
    probe_zeta = zeta0 + 0.5
    match = chordal(family(float(zm), probe_zeta), M(probe_zeta))
    defect = mobius_periodicity_defect(M, shift)
    fam_defect = chordal(family(float(zm), zeta0 + shift), family(float(zm), zeta0))

    if residual >= tol_cr:
        verdict = INCONCLUSIVE
        notes.append("holomorphy residual gate failed: s is not holomorphic in z")
    elif s_max > tol_zero:
        verdict = NONVANISHING
    elif any(p > tol_zero for p in propagated):
        verdict = INCONCLUSIVE
        notes.append("propagated bound on E- exceeds tol_zero")
    elif match > MOBIUS_MATCH_TOL:
        verdict = INCONCLUSIVE
        notes.append("family is not Moebius in the log chart over E-")
    elif not dich.branch_witness or defect.max_defect <= DEFECT_FLOOR:
        verdict = INCONCLUSIVE
        notes.append("no periodicity defect on the E- fiber")
    else:
        verdict = CONTRADICTION

    return CertificateReport(
        family=family.name, A=float(A), N=int(N), basepoint_w=w0, zeta0=zeta0,
        e_plus_points=tuple(e_plus), s_values=tuple(complex(s) for s in s_vals),
        s_max_e_plus=float(s_max), holomorphy_residual=float(residual),
        sup_bound_estimate=float(sup_s), e_minus_points=tuple(float(z) for z in e_minus),
        propagated_bounds=propagated, mobius_match_residual=float(match),
        monodromy_increment=complex(shift), loop_contractible=dich.contractible,
        monodromy_defect=float(defect.max_defect), family_periodicity_defect=float(fam_defect),
        tol_zero=float(tol_zero), tol_cr=float(tol_cr), verdict=verdict, notes=tuple(notes),
    )
