import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skewcyl import potential as P
from skewcyl.potential import SingularTerm, eval_u, eval_u_z, singular_points, tail_bound

from conftest import random_disc_points


def naive_u(z, N):
    """Direct partial summation, term by term."""
    total = math.log(abs(z - 0.5)) + math.log(abs(z + 0.5))
    for n in range(1, N + 1):
        a = n / (2 * n + 1)
        total += 2.0 ** (-n) * (math.log(abs(z - a)) + math.log(abs(z + a)))
    return total


def tail_segment_distance(z, N):
    a = (N + 1) / (2 * N + 3)
    ts = np.linspace(a, 0.5, 4001)
    return min(np.min(np.abs(z - ts)), np.min(np.abs(z + ts)))


def test_singular_points_plus_exact():
    assert singular_points("plus", 3, exact=True) == [
        SingularTerm(Fraction(1, 2), 1), SingularTerm(Fraction(1, 3), Fraction(1, 2)),
        SingularTerm(Fraction(2, 5), Fraction(1, 4)), SingularTerm(Fraction(3, 7), Fraction(1, 8)),
    ]


def test_singular_points_minus_reflects():
    assert singular_points("minus", 1, exact=True) == [
        SingularTerm(Fraction(-1, 2), 1), SingularTerm(Fraction(-1, 3), Fraction(1, 2))]
    plus = singular_points("plus", 40)
    minus = singular_points("minus", 40)
    assert [t.center for t in minus] == [-t.center for t in plus]
    assert [t.weight for t in minus] == [t.weight for t in plus]


def test_singular_points_monotone_toward_half():
    terms = singular_points("plus", 1000)
    centers = [t.center for t in terms[1:]]
    assert 0.4995 < centers[-1] < 0.5
    assert all(b > a for a, b in zip(centers, centers[1:]))
    assert centers[0] == pytest.approx(1 / 3)


def test_total_weight_is_four():
    terms = singular_points("plus", 60, exact=True)
    partial = 2 * sum(t.weight for t in terms)
    assert 4 - partial == Fraction(2, 2**60)


@pytest.mark.parametrize("bad", [0, -1])
def test_singular_points_rejects_count(bad):
    with pytest.raises(ValueError):
        singular_points("plus", bad)


@pytest.mark.parametrize("z", [Fraction(1, 3), 1 / 3, Fraction(-2, 5), 0.5, -0.5, Fraction(3, 7)])
def test_u_is_minus_inf_at_retained_centers(z):
    for N in (3, 10, 53):
        value, bound = eval_u(z, N)
        assert value == -math.inf


def test_u_symmetries_exact():
    for z in (0.3 + 0.1j, 0.71 - 0.2j, -0.05 + 0.9j):
        v = eval_u(z)[0]
        assert eval_u(-z)[0] == v
        assert eval_u(z.conjugate())[0] == v


def test_u_at_zero_against_naive_sum():
    v60, b60 = eval_u(0, 60)
    assert b60 < 1e-15
    v120 = naive_u(0j, 120)
    assert abs(v60 - v120) <= b60 + 4e-16 * abs(v120)


def test_eval_u_rejects_outside_disc():
    with pytest.raises(ValueError):
        eval_u(1.0)
    with pytest.raises(ValueError):
        eval_u(0.8 + 0.7j)


def test_truncation_consistency(rng):
    for N in (10, 20, 40):
        pts = random_disc_points(rng, 200, avoid=lambda z: tail_segment_distance(z, N), min_dist=1e-3)
        for z in pts:
            lo, _ = eval_u(z, N)
            hi, _ = eval_u(z, N + 20)
            assert abs(lo - hi) <= tail_bound(z, N)


def test_u_z_against_finite_differences():
    z, h = 0j, 1e-5
    d0 = eval_u_z(z, 40)
    ux = (eval_u(z + h, 40)[0] - eval_u(z - h, 40)[0]) / (2 * h)
    uy = (eval_u(z + 1j * h, 40)[0] - eval_u(z - 1j * h, 40)[0]) / (2 * h)
    assert abs(d0 - 0.5 * (ux - 1j * uy)) < 1e-8


def d4(f, z, e, h=1e-4):
    """Fourth-order central difference of f at z in direction e."""
    return (-f(z + 2 * h * e) + 8 * f(z + h * e) - 8 * f(z - h * e) + f(z - 2 * h * e)) / (12 * h)


def test_u_z_random_points(rng):
    u = P.partial_sum
    pts = random_disc_points(rng, 100, rmax=0.95, avoid=lambda z: tail_segment_distance(z, 0), min_dist=0.05)
    for z in pts:
        ux, uy = d4(u, z, 1), d4(u, z, 1j)
        assert abs(eval_u_z(z) - 0.5 * (ux - 1j * uy)) < 1e-8


def test_u_z_axis_symmetry():
    # u is even in Re z: u_x = 0 on the imaginary axis, so u_z = -i u_y / 2 is imaginary there
    for y in (0.1, -0.4, 0.9):
        assert eval_u_z(1j * y).real == pytest.approx(0.0, abs=1e-14)
    # u is even in Im z: u_z is real on the real axis
    for x in (0.1, -0.2, 0.9):
        assert eval_u_z(x).imag == 0.0


def test_u_z_conjugate_identity():
    z = 0.9j
    assert eval_u_z(z) == pytest.approx(eval_u_z(z.conjugate()).conjugate(), abs=1e-14)


def test_u_z_rejects_center():
    with pytest.raises(ValueError):
        eval_u_z(0.5)


def test_tail_bound_at_zero():
    assert tail_bound(0, 10) == pytest.approx(2.0**-9 * math.log(3), rel=1e-15)


def test_tail_bound_geometric_prefactor(rng):
    for z in random_disc_points(rng, 50, avoid=lambda z: tail_segment_distance(z, 5), min_dist=1e-3):
        for N in (5, 12, 30):
            assert tail_bound(z, N + 10) <= 2.0**-10 * tail_bound(z, N) * (1 + 1e-12)


def test_tail_bound_segment_membership():
    # a_25 = 25/51 > 0.49, so 0.49 is off the tail segment for N = 24 ...
    assert 0 < tail_bound(0.49, 24) < math.inf
    # ... and on it once a_{N+1} <= 0.49 (a_6 = 6/13)
    with pytest.raises(ValueError):
        tail_bound(0.49, 5)


def test_laplacian_refinement_ratio():
    def lap(z, h):
        f = P.partial_sum
        return (f(z + h) + f(z - h) + f(z + 1j * h) + f(z - 1j * h) - 4 * f(z)) / h**2

    for z in (0.2 + 0.3j, -0.1 - 0.2j, 0.5j, 0.6 + 0.1j, 0.25 + 0.05j):
        assert min(abs(z - c) for c in np.concatenate([P._plus_arrays(53)[0], -P._plus_arrays(53)[0]])) >= 0.05
        ratio = lap(z, 1e-3) / lap(z, 5e-4)
        assert 3.5 <= ratio <= 4.5


def test_vectorized_matches_scalar(rng):
    pts = np.array(random_disc_points(rng, 30, avoid=lambda z: tail_segment_distance(z, 0), min_dist=1e-3))
    vec = P.partial_sum(pts)
    assert all(vec[i] == P.partial_sum(complex(z)) for i, z in enumerate(pts))


@pytest.mark.parametrize("z,side", [
    (Fraction(1, 2), 1), (Fraction(-1, 2), -1), (Fraction(10, 21), 1), (Fraction(-7, 15), -1),
    (10 / 21, 1), (-7 / 15, -1), (Fraction(2, 7), 0), (0.45, 0), (0.3 + 0.1j, 0), (complex(1 / 3), 1),
])
def test_e_pm_membership(z, side):
    assert P.e_pm_side(z) == side


@settings(max_examples=200, deadline=None)
@given(st.floats(-0.95, 0.95), st.floats(-0.95, 0.95))
def test_symmetry_property(x, y):
    z = complex(x, y)
    if abs(z) >= 0.99 or tail_segment_distance(z, 0) == 0:
        return
    v = P.partial_sum(z)
    assert P.partial_sum(-z) == v
    assert P.partial_sum(z.conjugate()) == v
