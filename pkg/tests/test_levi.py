import math
from fractions import Fraction

import numpy as np
import pytest

from skewcyl import levi
from skewcyl.brset import DiscFibration
from skewcyl.levi import ComplexHessian, LeviReport, certify, find_min_A, rho_derivs_closed, tangent_levi, wirtinger_fd

EPS = levi.DEFAULT_EPSILON


def admissible_points(rng, n, rmax=0.95):
    out = []
    while len(out) < n:
        z = complex(*rng.uniform(-1, 1, 2))
        if abs(z) < rmax and not levi.in_exclusion(z, EPS):
            out.append(z)
    return out


def transition_points(rng, n, half_width=0.29):
    """Admissible points with |Re z| < half_width <= 7/24, where psi is not locally constant."""
    out = []
    while len(out) < n:
        z = complex(rng.uniform(-half_width, half_width), rng.uniform(-0.9, 0.9))
        if abs(z) < 0.95:
            out.append(z)
    return out


def fd_entries(fib, z, theta, step=1e-3, w_scale=None):
    w = levi.boundary_w(z, theta, fib=fib)
    w_scale = fib.radius(z) if w_scale is None else w_scale
    (fz, fw), hess = wirtinger_fd(levi.rho_field(fib), (z, w), step=step, w_scale=w_scale)
    return fz, fw, hess


def normwise(closed, fd):
    a = np.array([closed[0], closed[1], closed[2].f_zzbar, closed[2].f_wwbar, closed[2].f_zwbar])
    b = np.array([fd[0], fd[1], fd[2].f_zzbar, fd[2].f_wwbar, fd[2].f_zwbar])
    return np.max(np.abs(a - b)) / np.max(np.abs(a))


# --- wirtinger_fd on exact fields -------------------------------------------

def test_fd_modulus_squared():
    (fz, fw), h = wirtinger_fd(lambda z, w: abs(z) ** 2, (0.3 + 0.2j, 0.5))
    assert abs(h.f_zzbar - 1) < 1e-8
    assert abs(h.f_wwbar) < 1e-8 and abs(h.f_zwbar) < 1e-8
    assert abs(fz - (0.3 - 0.2j)) < 1e-8 and abs(fw) < 1e-8


def test_fd_log_modulus_is_harmonic():
    (_, fw), h = wirtinger_fd(lambda z, w: math.log(abs(w)), (0.1, 2.0))
    assert abs(h.f_wwbar) < 1e-8
    assert abs(fw - 0.25) < 1e-8


def test_fd_mixed_term():
    _, h = wirtinger_fd(lambda z, w: (z * w.conjugate()).real, (0.2 - 0.1j, 1 + 1j))
    assert abs(h.f_zwbar - 0.5) < 1e-8
    assert abs(h.f_zzbar) < 1e-8 and abs(h.f_wwbar) < 1e-8


def test_fd_rejects_singular_stencil():
    with pytest.raises(ValueError):
        wirtinger_fd(lambda z, w: math.log(abs(w)) if w != 0 else -math.inf, (0, 0))
    with pytest.raises(ValueError):
        wirtinger_fd(lambda z, w: 0.0, (0, 1), step=0)


def test_complex_hessian_form_matches_matrix():
    h = ComplexHessian(2.0, 0.5, 0.3 - 0.4j)
    t = np.array([1 - 1j, 0.5 + 2j])
    assert h.form(t[0], t[1]) == pytest.approx((t @ h.matrix() @ t.conj()).real, abs=1e-14)
    assert np.allclose(h.matrix(), h.matrix().conj().T)


# --- closed form vs finite differences ----------------------------------------

def test_closed_form_matches_fd_at_1000_points(rng):
    fib = DiscFibration(10.0)
    worst = 0.0
    for z in admissible_points(rng, 1000):
        theta = rng.uniform(0, 2 * math.pi)
        closed = rho_derivs_closed(z, theta, fib=fib)
        worst = max(worst, normwise(closed, fd_entries(fib, z, theta)))
    assert worst < 1e-6


def test_closed_form_matches_fd_in_transition_region_small_A(rng):
    # at A = 0 the psi terms dominate, so the check is sharp; the stencil must
    # resolve the fiber radius, and stays clear of the C^2 seams at Re z = +-7/24
    fib = DiscFibration(0.0)
    for z in transition_points(rng, 100, half_width=0.27):
        theta = rng.uniform(0, 2 * math.pi)
        closed = rho_derivs_closed(z, theta, fib=fib)
        fd = fd_entries(fib, z, theta, step=3e-3 * min(1.0, fib.radius(z)), w_scale=1.0)
        assert normwise(closed, fd) < 1e-6


def test_assembled_levi_matches_closed_form(rng):
    fib = DiscFibration(10.0)
    for z in admissible_points(rng, 200):
        theta = rng.uniform(0, 2 * math.pi)
        fz, fw, hess = fd_entries(fib, z, theta)
        assert abs(levi.levi_from_derivs(fz, fw, hess) - tangent_levi(z, theta, fib=fib)) < 1e-5


def test_f_wwbar_vanishes(rng):
    for z in admissible_points(rng, 50):
        _, _, h = rho_derivs_closed(z, 1.3, A=10.0)
        assert abs(h.f_wwbar) < 1e-10


def test_plateau_points():
    for z in (0.6, -0.6 + 0.3j, 0.3 + 0.5j, -0.4 - 0.1j, 0.5 + 0.8j):
        for theta in np.linspace(0, 2 * math.pi, 7):
            rz, rw, h = rho_derivs_closed(z, theta, A=10.0)
            assert h.f_zwbar == 0 and h.f_zzbar == 1
            assert abs(tangent_levi(z, theta, A=-5.0) - 1) < 1e-10


def test_levi_values_vectorized_matches_scalar(rng):
    fib = DiscFibration(3.0)
    zs = np.array(transition_points(rng, 20))
    thetas = levi.theta_grid(8)
    H = levi.levi_values(fib, zs[:, None], thetas[None, :])
    for i, z in enumerate(zs):
        for j, t in enumerate(thetas):
            assert H[i, j] == pytest.approx(tangent_levi(z, t, fib=fib), abs=1e-12)


def test_min_over_theta_bounds_grid(rng):
    fib = DiscFibration(2.0)
    zs = np.array(transition_points(rng, 50))
    fine = levi.levi_values(fib, zs[:, None], levi.theta_grid(4096)[None, :]).min(axis=1)
    exact = levi.min_over_theta(fib, zs)
    assert np.all(exact <= fine + 1e-12)
    assert np.allclose(exact, fine, atol=1e-5)


def test_precondition_errors():
    with pytest.raises(ValueError):
        rho_derivs_closed(Fraction(1, 3), 0.0)
    with pytest.raises(ValueError):
        rho_derivs_closed(0.4 + 0.01j, 0.0)
    with pytest.raises(ValueError):
        rho_derivs_closed(0.9 + 0.9j, 0.0)


# --- flattening in A --------------------------------------------------------

def test_transition_point_close_to_one():
    h30 = tangent_levi(0.1, 0.0, A=30.0)
    assert abs(h30 - 1) < 1e-3
    errs = [abs(tangent_levi(0.1, 0.0, A=A) - 1) for A in (10, 20, 30, 45, 60)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-20


def test_flattening_constant(golden):
    C = golden["levi_flattening_C"]
    prev = None
    for A in (10.0, 15.0, 20.0):
        H = tangent_levi(0.1, 0.0, A=A)
        assert abs(H - 1) <= C * math.exp(-A)
        if prev is not None:
            assert abs(H - 1) < prev
        prev = abs(H - 1)


# --- certification ------------------------------------------------------------

def test_certify_at_default_A(golden):
    r = certify(10.0, (64, 64), 32, EPS, 0.5)
    assert r.certified and r.min_H >= 0.5
    assert r.min_H == pytest.approx(golden["levi_min_H_A10"], rel=1e-12)


def test_certify_fails_for_negative_A():
    r = certify(-20.0, (64, 64), 32, EPS, 0.5)
    assert not r.certified and r.min_H < 0


def test_plateau_only_grid_is_one():
    fib = DiscFibration(-40.0)
    Z = levi.certification_grid((64, 64), EPS)
    Z = Z[np.abs(Z.real) >= 7 / 24]
    m, _ = levi.evaluate_grid(fib, Z, levi.theta_grid(16))
    assert m == 1.0


def test_certify_deterministic_across_workers():
    a = certify(5.0, (64, 64), 32, EPS, 0.1, workers=1)
    b = certify(5.0, (64, 64), 32, EPS, 0.1, workers=4)
    assert a == b
    assert a.to_dict() == b.to_dict()


def test_report_roundtrip_and_invariant():
    r = certify(10.0, (16, 16), 8)
    assert LeviReport.from_dict(r.to_dict()) == r
    assert r.certified == (r.min_H >= r.margin_requested)
    assert abs(r.argmin_z) < 1 and not levi.in_exclusion(r.argmin_z, r.epsilon)


def test_invalid_grids():
    with pytest.raises(ValueError):
        certify(10.0, (0, 64))
    with pytest.raises(ValueError):
        certify(10.0, theta_count=0)
    with pytest.raises(ValueError):
        certify(10.0, epsilon=0.1)
    with pytest.raises(ValueError):
        certify(10.0, epsilon=-1.0)


def test_find_min_A(golden):
    a = find_min_A(-30.0, 30.0)
    assert -30 < a < 30
    assert a == pytest.approx(golden["levi_A_star"], abs=1e-12)
    assert certify(a + 1, margin=0.1).certified
    assert not certify(a - 1, margin=0.1).certified
    assert not certify(a - 1e-2, margin=0.1).certified


def test_find_min_A_bad_bracket():
    with pytest.raises(ValueError):
        find_min_A(10.0, 30.0)
    with pytest.raises(ValueError):
        find_min_A(-30.0, -20.0)
    with pytest.raises(ValueError):
        find_min_A(5.0, 5.0)


def test_grid_csv_header_and_rows():
    text = levi.grid_csv(DiscFibration(10.0), (8, 8), 4)
    lines = text.strip().split("\n")
    assert lines[0] == "z_re,z_im,theta,H"
    assert len(lines) - 1 == len(levi.certification_grid((8, 8), EPS)) * 4
