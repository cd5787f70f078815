"""Levi form of the boundary of K and grid certification of pseudoconvexity.

The complement of K is the sublevel set {rho < 0} of

    rho(z, w) = u(z) + |z|^2 + A - log|w - psi(z)|.

At a boundary point w = psi(z) + r(z) e^{i theta}, pseudoconvexity asks that
the complex Hessian of rho be nonnegative on the complex tangent line
rho_z t_z + rho_w t_w = 0.  Writing zeta = w - psi(z) (psi is real):

    rho_z     = u_z + conj(z) + psi_z Re(1/zeta)
    rho_w     = -1 / (2 zeta)
    rho_zzbar = 1 + psi_zzbar Re(1/zeta) + |psi_z|^2 Re(1/zeta^2)
    rho_zwbar = -psi_z / (2 conj(zeta)^2)
    rho_wwbar = 0

u contributes nothing to rho_zzbar since it is harmonic off its singularities.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import potential
from .brset import DiscFibration

SCHEMA_VERSION = 1
DEFAULT_EPSILON = 1.0 / 48.0
LEVI_CSV_COLUMNS = ("z_re", "z_im", "theta", "H")


@dataclass(frozen=True)
class ComplexHessian:
    f_zzbar: float
    f_wwbar: float
    f_zwbar: complex

    def form(self, t_z: complex, t_w: complex) -> float:
        """Hermitian form sum f_{j kbar} t_j conj(t_k)."""
        return (self.f_zzbar * abs(t_z) ** 2
                + 2.0 * (self.f_zwbar * t_z * np.conj(t_w)).real
                + self.f_wwbar * abs(t_w) ** 2)

    def matrix(self) -> np.ndarray:
        return np.array([[self.f_zzbar, self.f_zwbar],
                         [np.conj(self.f_zwbar), self.f_wwbar]], dtype=complex)


def _closed_arrays(fib: DiscFibration, z, theta):
    """Vectorized closed-form derivatives at boundary points; z and theta broadcast."""
    z = np.asarray(z, dtype=complex)
    theta = np.asarray(theta, dtype=float)
    psi_z, _, psi_zzbar = fib.step.derivs(z)
    psi_z = np.asarray(psi_z, dtype=complex)
    phi = fib.radius_exponent(z)
    r = np.exp(phi)
    zeta = r * np.exp(1j * theta)
    inv = 1.0 / zeta
    u_z = potential.eval_u_z(z, fib.potential.truncation)
    rho_z = u_z + np.conj(z) + psi_z * inv.real
    rho_w = -0.5 * inv
    f_zzbar = 1.0 + psi_zzbar * inv.real + np.abs(psi_z) ** 2 * (inv * inv).real
    f_zwbar = -psi_z / (2.0 * np.conj(zeta) ** 2)
    f_wwbar = np.zeros(np.broadcast(z, theta).shape)
    return rho_z, rho_w, f_zzbar, f_wwbar, f_zwbar, zeta


def _check_point(fib: DiscFibration, z, epsilon: float) -> complex:
    zc = complex(float(z)) if isinstance(z, Fraction) else complex(z)
    if abs(zc) >= 1.0:
        raise ValueError("z must lie in the open unit disc")
    if potential.e_pm_side(z):
        raise ValueError("degenerate fiber: no smooth boundary")
    if in_exclusion(zc, epsilon):
        raise ValueError("z lies inside an exclusion strip around E+-")
    return zc


def rho_derivs_closed(z, theta: float, A: float = 10.0, epsilon: float = DEFAULT_EPSILON,
                      fib: DiscFibration | None = None):
    """Closed-form (rho_z, rho_w, ComplexHessian) at the boundary point over z at angle theta."""
    fib = fib or DiscFibration(A)
    zc = _check_point(fib, z, epsilon)
    rho_z, rho_w, fzz, fww, fzw, _ = _closed_arrays(fib, zc, theta)
    return complex(rho_z), complex(rho_w), ComplexHessian(float(fzz), float(fww), complex(fzw))


def boundary_w(z, theta: float, A: float = 10.0, fib: DiscFibration | None = None) -> complex:
    fib = fib or DiscFibration(A)
    fd = fib.fiber(z)
    return fd.center + fd.radius * complex(math.cos(theta), math.sin(theta))


def rho_field(fib: DiscFibration) -> Callable[[complex, complex], float]:
    """rho(z, w) as a plain scalar function (finite-difference input)."""

    def rho(z: complex, w: complex) -> float:
        center = float(fib.step(z))
        return fib.radius_exponent(z) - math.log(abs(w - center))

    return rho


def _real_partials(f, x0: np.ndarray, h: np.ndarray):
    """Central-difference gradient and Hessian with per-coordinate steps h."""
    n = len(x0)
    f0 = f(x0)
    grad = np.empty(n)
    hess = np.empty((n, n))
    E = np.diag(h)
    fp = [f(x0 + E[i]) for i in range(n)]
    fm = [f(x0 - E[i]) for i in range(n)]
    for i in range(n):
        grad[i] = (fp[i] - fm[i]) / (2 * h[i])
        hess[i, i] = (fp[i] - 2 * f0 + fm[i]) / (h[i] * h[i])
        for j in range(i + 1, n):
            v = (f(x0 + E[i] + E[j]) - f(x0 + E[i] - E[j])
                 - f(x0 - E[i] + E[j]) + f(x0 - E[i] - E[j])) / (4 * h[i] * h[j])
            hess[i, j] = hess[j, i] = v
    return grad, hess


def wirtinger_fd(field: Callable[[complex, complex], float], point: tuple[complex, complex],
                 step: float = 1e-3, richardson: bool = True, w_scale: float = 1.0):
    """Finite-difference Wirtinger gradient (f_z, f_w) and complex Hessian of a real field.

    Central differences in the four real coordinates (x1, y1, x2, y2), then
    f_z = (f_x1 - i f_y1)/2, f_zzbar = (f_x1x1 + f_y1y1)/4 and
    f_zwbar = (f_x1x2 + f_y1y2 + i (f_x1y2 - f_y1x2))/4.  With richardson=True
    the steps h and h/2 are combined to cancel the h^2 error term.  The w
    stencil uses spacing step * w_scale; pass the fiber radius when the
    field varies on that scale in w.
    """
    if step <= 0 or w_scale <= 0:
        raise ValueError("steps must be positive")
    z0, w0 = complex(point[0]), complex(point[1])
    x0 = np.array([z0.real, z0.imag, w0.real, w0.imag])

    def f(x):
        val = field(complex(x[0], x[1]), complex(x[2], x[3]))
        if not math.isfinite(val):
            raise ValueError("finite-difference stencil touches a singularity")
        return val

    h = step * np.array([1.0, 1.0, w_scale, w_scale])
    g, H = _real_partials(f, x0, h)
    if richardson:
        g2, H2 = _real_partials(f, x0, h / 2)
        g = (4 * g2 - g) / 3
        H = (4 * H2 - H) / 3
    f_z = 0.5 * complex(g[0], -g[1])
    f_w = 0.5 * complex(g[2], -g[3])
    hess = ComplexHessian(
        f_zzbar=0.25 * (H[0, 0] + H[1, 1]),
        f_wwbar=0.25 * (H[2, 2] + H[3, 3]),
        f_zwbar=0.25 * complex(H[0, 2] + H[1, 3], H[0, 3] - H[1, 2]),
    )
    return (f_z, f_w), hess


def levi_from_derivs(rho_z: complex, rho_w: complex, hess: ComplexHessian) -> float:
    """Hessian restricted to the complex tangent t = (1, -rho_z/rho_w)."""
    if rho_w == 0:
        raise ValueError("rho_w vanishes; tangent line undefined")
    return hess.form(1.0, -rho_z / rho_w)


def tangent_levi(z, theta, A: float = 10.0, epsilon: float = DEFAULT_EPSILON,
                 fib: DiscFibration | None = None) -> float:
    rho_z, rho_w, hess = rho_derivs_closed(z, theta, A, epsilon, fib)
    return levi_from_derivs(rho_z, rho_w, hess)


def levi_values(fib: DiscFibration, z, theta) -> np.ndarray:
    """Vectorized tangent Levi values; broadcasts z against theta.  No exclusion check."""
    rho_z, rho_w, fzz, fww, fzw, zeta = _closed_arrays(fib, z, theta)
    # t_w = -rho_z/rho_w = 2 zeta rho_z
    t_w = 2.0 * zeta * rho_z
    return fzz + 2.0 * (fzw * np.conj(t_w)).real + fww * np.abs(t_w) ** 2


def min_over_theta(fib: DiscFibration, z) -> np.ndarray:
    """Exact minimum over all angles.

    Along a fiber boundary H = 1 + Re(c e^{-i theta})/r - |psi_z|^2/r^2 with
    c = psi_zzbar - 2 psi_z (u_z + conj z), so min_theta H = 1 - |c|/r - |psi_z|^2/r^2.
    """
    z = np.asarray(z, dtype=complex)
    psi_z, _, psi_zzbar = fib.step.derivs(z)
    psi_z = np.asarray(psi_z, dtype=complex)
    r = np.exp(fib.radius_exponent(z))
    u_z = potential.eval_u_z(z, fib.potential.truncation)
    c = psi_zzbar - 2.0 * psi_z * (u_z + np.conj(z))
    return 1.0 - np.abs(c) / r - np.abs(psi_z) ** 2 / r ** 2


# --- grid certification ---------------------------------------------------

def segment_distance(z) -> np.ndarray:
    """Distance to the nearer of the segments [1/3, 1/2] and [-1/2, -1/3]."""
    z = np.asarray(z, dtype=complex)
    x, y = np.abs(z.real), np.abs(z.imag)
    dx = np.maximum(np.maximum(1.0 / 3.0 - x, 0.0), x - 0.5)
    return np.hypot(dx, y)


def in_exclusion(z, epsilon: float):
    return segment_distance(z) < epsilon


def certification_grid(z_resolution: tuple[int, int], epsilon: float) -> np.ndarray:
    """Cell centers of an nx x ny grid on [-1,1]^2, inside D, outside the exclusion strips."""
    nx, ny = z_resolution
    if nx < 1 or ny < 1:
        raise ValueError("grid resolution must be positive")
    xs = -1.0 + (2.0 * np.arange(nx) + 1.0) / nx
    ys = -1.0 + (2.0 * np.arange(ny) + 1.0) / ny
    Z = (xs[None, :] + 1j * ys[:, None]).ravel()
    keep = (np.abs(Z) < 1.0) & ~in_exclusion(Z, epsilon)
    return Z[keep]


def theta_grid(theta_count: int) -> np.ndarray:
    if theta_count < 1:
        raise ValueError("theta_count must be positive")
    return 2.0 * np.pi * np.arange(theta_count) / theta_count


@dataclass(frozen=True)
class LeviReport:
    A: float
    z_resolution: tuple[int, int]
    theta_count: int
    epsilon: float
    min_H: float
    argmin_z: complex
    argmin_theta: float
    margin_requested: float
    certified: bool
    n_points: int
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z_resolution"] = list(self.z_resolution)
        d["argmin_z"] = [self.argmin_z.real, self.argmin_z.imag]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LeviReport":
        d = dict(d)
        d["z_resolution"] = tuple(d["z_resolution"])
        d["argmin_z"] = complex(*d["argmin_z"])
        return cls(**d)


def _validate(z_resolution, theta_count, epsilon, step_edge: float):
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    # excluded points must be covered by the exact plateau case
    if 1.0 / 3.0 - epsilon < step_edge:
        raise ValueError("exclusion strips must lie inside the psi plateaus")
    if len(z_resolution) != 2 or min(z_resolution) < 1 or theta_count < 1:
        raise ValueError("invalid grid")


def _row_min(fib, zrow, thetas):
    H = levi_values(fib, zrow[:, None], thetas[None, :])
    k = int(np.argmin(H))
    return float(H.flat[k]), k


def evaluate_grid(fib: DiscFibration, Z: np.ndarray, thetas: np.ndarray, workers: int = 1):
    """Return (min_H, flat index into Z x thetas).

    Work is split into fixed chunks independent of `workers`, so the result is
    bit-identical for any worker count; ties go to the smallest flat index.
    """
    chunk = 256
    starts = list(range(0, len(Z), chunk))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda s: _row_min(fib, Z[s:s + chunk], thetas), starts))
    else:
        parts = [_row_min(fib, Z[s:s + chunk], thetas) for s in starts]
    best, best_idx = math.inf, -1
    for s, (v, k) in zip(starts, parts):
        idx = s * len(thetas) + k
        if v < best or (v == best and idx < best_idx):
            best, best_idx = v, idx
    return best, best_idx


def certify(A: float, z_resolution=(64, 64), theta_count: int = 32,
            epsilon: float = DEFAULT_EPSILON, margin: float = 0.5, workers: int = 1,
            fib: DiscFibration | None = None) -> LeviReport:
    fib = fib or DiscFibration(A)
    if fib.A != A:
        raise ValueError("fibration constant does not match A")
    z_resolution = tuple(int(v) for v in z_resolution)
    _validate(z_resolution, theta_count, epsilon, fib.step.s)
    Z = certification_grid(z_resolution, epsilon)
    thetas = theta_grid(theta_count)
    if len(Z) == 0:
        raise ValueError("grid has no admissible points")
    min_H, idx = evaluate_grid(fib, Z, thetas, workers)
    zi, ti = divmod(idx, len(thetas))
    return LeviReport(
        A=float(A), z_resolution=z_resolution, theta_count=int(theta_count),
        epsilon=float(epsilon), min_H=min_H, argmin_z=complex(Z[zi]),
        argmin_theta=float(thetas[ti]), margin_requested=float(margin),
        certified=bool(min_H >= margin), n_points=int(len(Z) * len(thetas)),
    )


def find_min_A(lo: float, hi: float, z_resolution=(64, 64), theta_count: int = 32,
               epsilon: float = DEFAULT_EPSILON, margin: float = 0.1, workers: int = 1,
               width: float = 1e-2) -> float:
    """Bisect for the smallest A certified on the grid, to absolute width `width`."""
    def ok(A):
        return certify(A, z_resolution, theta_count, epsilon, margin, workers).certified

    if not lo < hi:
        raise ValueError("bracket requires lo < hi")
    if ok(lo) or not ok(hi):
        raise ValueError("bracket invalid: need certify(lo) false and certify(hi) true")
    passed, failed = [hi], [lo]
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
            passed.append(mid)
        else:
            lo = mid
            failed.append(mid)
        if max(failed) >= min(passed):
            raise RuntimeError("certification is not monotone in A on this grid")
    return hi


def grid_csv(fib: DiscFibration, z_resolution=(64, 64), theta_count: int = 32,
             epsilon: float = DEFAULT_EPSILON) -> str:
    """Levi grid dump with frozen columns z_re, z_im, theta, H."""
    Z = certification_grid(tuple(z_resolution), epsilon)
    thetas = theta_grid(theta_count)
    H = levi_values(fib, Z[:, None], thetas[None, :])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LEVI_CSV_COLUMNS)
    for i, z in enumerate(Z):
        for j, t in enumerate(thetas):
            w.writerow([repr(z.real), repr(z.imag), repr(float(t)), repr(float(H[i, j]))])
    return buf.getvalue()
