"""Weighted logarithmic potential with singularities on the sets E+ and E-.

The potential is

    u(z) = ln|z - 1/2| + ln|z + 1/2|
           + sum_{n >= 1} 2^-n (ln|z - a_n| + ln|z + a_n|),   a_n = n/(2n+1)

It is harmonic on the disc away from E+ = {1/2, a_n} and E- = -E+, where it
equals -inf.  Everything here works on a truncation through n = N together
with an explicit bound for the omitted tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

DEFAULT_TRUNCATION = 53
LN3 = math.log(3.0)


@dataclass(frozen=True)
class SingularTerm:
    center: float | Fraction
    weight: float | Fraction


def a_n(n: int) -> Fraction:
    return Fraction(n, 2 * n + 1)


def singular_points(side: str, count: int, exact: bool = False) -> list[SingularTerm]:
    """Return the point +-1/2 (weight 1) followed by +-a_n (weight 2^-n), n = 1..count."""
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    if count < 1:
        raise ValueError("count must be >= 1")
    sign = 1 if side == "plus" else -1
    terms = [SingularTerm(sign * Fraction(1, 2), Fraction(1))]
    terms += [SingularTerm(sign * a_n(n), Fraction(1, 2**n)) for n in range(1, count + 1)]
    if exact:
        return terms
    return [SingularTerm(float(t.center), float(t.weight)) for t in terms]


@dataclass(frozen=True)
class LogPotential:
    """Truncation of u through n = truncation; the minus family mirrors the plus family."""

    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")

    def terms(self, side: str = "plus", exact: bool = False) -> list[SingularTerm]:
        return singular_points(side, self.truncation, exact=exact)

    def value(self, z):
        return eval_u(z, self.truncation)

    def wirtinger(self, z):
        return eval_u_z(z, self.truncation)

    def tail_bound(self, z):
        return tail_bound(z, self.truncation)


@lru_cache(maxsize=64)
def _plus_arrays(N: int) -> tuple[np.ndarray, np.ndarray]:
    terms = singular_points("plus", N)
    centers = np.array([t.center for t in terms], dtype=float)
    weights = np.array([t.weight for t in terms], dtype=float)
    centers.flags.writeable = False
    weights.flags.writeable = False
    return centers, weights


def _check_disc(z) -> None:
    if np.any(np.abs(np.asarray(z, dtype=complex)) >= 1.0):
        raise ValueError("z must lie in the open unit disc")


def e_pm_side(z) -> int:
    """Return +1 if z lies in E+, -1 if in E-, 0 otherwise.

    Rationals are tested exactly.  Floats are compared with tolerance 0
    against the correctly rounded float of the matching center.
    """
    if isinstance(z, complex):
        if z.imag != 0:
            return 0
        z = z.real
    if isinstance(z, Rational):
        x = Fraction(z)
        sign = 1 if x > 0 else -1
        ax = abs(x)
        if ax == Fraction(1, 2):
            return sign
        if not Fraction(1, 3) <= ax < Fraction(1, 2):
            return 0
        n = ax / (1 - 2 * ax)
        return sign if n.denominator == 1 else 0
    x = float(z)
    if not math.isfinite(x) or x == 0.0:
        return 0
    sign = 1 if x > 0 else -1
    ax = abs(x)
    if ax == 0.5:
        return sign
    if not 1 / 3 <= ax < 0.5:
        return 0
    n = round(ax / (1 - 2 * ax))
    # the float n/(2n+1) rounds the same way as the exact rational
    for m in (n - 1, n, n + 1):
        if m >= 1 and m / (2 * m + 1) == ax:
            return sign
    return 0


def _as_complex(z):
    if isinstance(z, Fraction):
        return complex(float(z))
    return np.asarray(z, dtype=complex) if isinstance(z, np.ndarray) else complex(z)


def partial_sum(z, N: int = DEFAULT_TRUNCATION):
    """Partial sum of u through n = N; vectorized over z.  -inf at retained centers."""
    zc = np.asarray(_as_complex(z), dtype=complex)
    centers, weights = _plus_arrays(N)
    zz = zc[..., None]
    with np.errstate(divide="ignore"):
        # pair z - c with z + c so that z -> -z swaps the pair, leaving each sum bit-identical
        pair = np.log(np.abs(zz - centers)) + np.log(np.abs(zz + centers))
    val = np.sum(weights * pair, axis=-1)
    if np.ndim(z) == 0 and not isinstance(z, np.ndarray):
        return float(val)
    return val


def _tail_distance(z, N: int):
    zc = np.asarray(_as_complex(z), dtype=complex)
    lo = float(a_n(N + 1))
    x, y = np.abs(zc.real), np.abs(zc.imag)
    dx = np.maximum(np.maximum(lo - x, 0.0), x - 0.5)
    return np.hypot(dx, y)


def tail_bound(z, N: int = DEFAULT_TRUNCATION):
    """Majorant of |u(z) - partial_sum(z, N)|: 2 * 2^-N * max(|ln d|, ln 3).

    d is the distance from z to the tail segments [a_{N+1}, 1/2] and
    [-1/2, -a_{N+1}]; every omitted term has d <= |z -+ a_n| < 3.
    """
    d = _tail_distance(z, N)
    if np.any(d == 0.0):
        raise ValueError("z lies on a tail segment; no finite tail bound")
    out = 2.0 ** (-N) * 2.0 * np.maximum(np.abs(np.log(d)), LN3)
    return float(out) if np.ndim(out) == 0 else out


def eval_u(z, N: int = DEFAULT_TRUNCATION) -> tuple[float, float]:
    """Return (partial sum through N, tail bound) at a single point of the disc.

    The value is -inf exactly when z is a retained singular point.  When z
    sits on a tail segment no finite bound exists and inf is reported.
    """
    _check_disc(_as_complex(z))
    side = e_pm_side(z)
    if side:
        x = Fraction(z) if isinstance(z, Rational) else None
        if x is not None:
            ax = abs(x)
            idx = 0 if ax == Fraction(1, 2) else int(ax / (1 - 2 * ax))
            if idx <= N:
                return -math.inf, 0.0
    value = partial_sum(z, N)
    if value == -math.inf:
        return value, 0.0
    d = float(_tail_distance(z, N))
    bound = math.inf if d == 0.0 else 2.0 ** (-N) * 2.0 * max(abs(math.log(d)), LN3)
    return value, bound


def eval_u_z(z, N: int = DEFAULT_TRUNCATION):
    """z-Wirtinger derivative of the truncated potential: (1/2) sum w/(z - c) over both families."""
    zc = np.asarray(_as_complex(z), dtype=complex)
    centers, weights = _plus_arrays(N)
    zz = zc[..., None]
    dm, dp = zz - centers, zz + centers
    if np.any(dm == 0) or np.any(dp == 0):
        raise ValueError("z coincides with a retained singular point")
    val = 0.5 * np.sum(weights * (1.0 / dm + 1.0 / dp), axis=-1)
    if np.ndim(z) == 0 and not isinstance(z, np.ndarray):
        return complex(val)
    return val


def weight_sum_bound() -> float:
    """Upper bound for u on the disc: total weight 4 times ln 3 (every |z -+ c| < 3)."""
    return 4.0 * LN3
