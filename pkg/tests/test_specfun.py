"""Tests for the Bessel evaluation layer.

Oracles, in order of independence: an integral representation of J_0
computed by quadrature inside the test, trigonometric closed forms at
half-integer orders, and mpmath at 30 digits for everything else.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from bessel_heat import DomainError, IterationError, PoleError
from bessel_heat.specfun import (
    bessel_i_scaled,
    bessel_j,
    bessel_j_zero,
    eigen_mode,
)

mp.mp.dps = 30


def j0_integral(z: float) -> float:
    """J_0(z) = (2/pi) int_0^(pi/2) cos(z sin theta) dtheta.

    Gauss-Legendre with 200 nodes; exact to well below 1e-14 for the
    arguments used here.  Shares no code with the implementation under
    test.
    """
    nodes, weights = np.polynomial.legendre.leggauss(200)
    theta = 0.25 * math.pi * (nodes + 1.0)
    return float(np.dot(weights, np.cos(z * np.sin(theta)))) * 0.5


def test_j0_against_integral_representation():
    for z in (0.1, 0.5, 1.0, 2.0, 5.0, 11.0, 24.5):
        assert abs(bessel_j(0.0, z) - j0_integral(z)) < 1e-13


def test_first_zero_of_j0_bisection_oracle():
    # bisect the independent integral representation, then compare
    lo, hi = 2.0, 3.0
    assert j0_integral(lo) > 0.0 > j0_integral(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if j0_integral(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    oracle = 0.5 * (lo + hi)
    assert abs(oracle - 2.404825557695773) < 1e-12
    assert abs(bessel_j_zero(0.0, 1) - oracle) < 1e-11


@pytest.mark.parametrize("nu", [-0.5, 0.5])
def test_half_integer_closed_forms(nu):
    """J_(1/2) and J_(-1/2) are scaled sine and cosine."""
    zs = np.linspace(0.1, 50.0, 907)
    trig = np.sin if nu > 0 else np.cos
    # rel-to-amplitude comparison, skipping points too close to a node
    keep = np.abs(trig(zs)) > 0.02
    zs = zs[keep]
    exact = np.sqrt(2.0 / (np.pi * zs)) * trig(zs)
    amp = np.sqrt(2.0 / (np.pi * zs))
    err = np.abs(bessel_j(nu, zs) - exact) / amp
    assert err.max() < 1e-12


@pytest.mark.parametrize("nu", [-0.9, -0.5, -0.1, 0.0, 0.5, 1.0, 1.7, 2.5,
                                4.0, 6.0, 10.0, 15.0, 22.0, 30.0])
def test_bessel_j_against_mpmath(nu):
    zs = [0.05, 0.3, 1.0, 3.0, 7.0, 12.5, 20.0, 33.0, 44.3, 80.0, 150.0]
    tol = 5e-12 if nu <= 6.0 else 1e-10
    for z in zs:
        ref = float(mp.besselj(nu, z))
        scale = max(1.0, math.sqrt(2.0 / (math.pi * z)))
        assert abs(bessel_j(nu, z) - ref) < tol * scale, (nu, z)


def test_bessel_j_vectorized_matches_scalar():
    zs = np.array([0.2, 1.0, 9.5, 60.0])
    vec = bessel_j(1.3, zs)
    assert vec.shape == zs.shape
    for i, z in enumerate(zs):
        assert vec[i] == bessel_j(1.3, float(z))


def test_bessel_j_at_zero_argument():
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(2.5, 0.0) == 0.0
    assert bessel_j(-0.5, 0.0) == math.inf


@pytest.mark.parametrize("nu", [-0.95, -0.5, 0.0, 0.5, 3.2, 15.0])
def test_zero_residuals_certified(nu):
    """Each tabulated zero carries |J(lam)| below 1e-12 of the local scale."""
    eps = 1e-6
    for n in range(1, 51):
        lam = bessel_j_zero(nu, n)
        deriv = (bessel_j(nu, lam + eps) - bessel_j(nu, lam - eps)) / (2 * eps)
        assert abs(bessel_j(nu, lam)) <= 1e-12 * max(1.0, abs(deriv) * lam)


@pytest.mark.parametrize("nu", [0.0, 0.5, 3.2, 15.0])
def test_zeros_against_mpmath(nu):
    for n in (1, 2, 3, 7, 20):
        ref = float(mp.besseljzero(nu, n))
        assert abs(bessel_j_zero(nu, n) - ref) < 5e-11


@pytest.mark.parametrize("nu", [-0.9, -0.3])
def test_negative_order_zeros_against_mpmath(nu):
    # mpmath's zero tables stop at nu >= 0; refine ours with findroot
    # under mpmath's own J and require the refinement not to move
    for n in (1, 2, 5, 12):
        lam = bessel_j_zero(nu, n)
        refined = float(mp.findroot(lambda x: mp.besselj(nu, x), lam))
        assert abs(refined - lam) < 5e-11


@pytest.mark.parametrize("nu", [-0.75, -0.5, 0.0, 0.5, 2.0, 9.0])
def test_zero_interlacing_in_order(nu):
    """lam_n(nu) < lam_n(nu+1) < lam_(n+1)(nu) for n <= 50."""
    for n in range(1, 51):
        a = bessel_j_zero(nu, n)
        b = bessel_j_zero(nu + 1.0, n)
        c = bessel_j_zero(nu, n + 1)
        assert a < b < c


def test_zeros_increasing_and_gap_window():
    """Consecutive-zero gaps approach pi; the tail window is [0.9pi, 1.1pi].

    The window is what the series truncation certificate assumes from
    mode 10 onward, so it is pinned here as a tested fact.
    """
    for nu in (-0.999, -0.5, 0.0, 1.3, 7.0, 15.0):
        lams = np.array([bessel_j_zero(nu, n) for n in range(1, 202)])
        gaps = np.diff(lams)
        assert np.all(gaps > 0.0)
        tail = gaps[9:]
        assert tail.min() > 0.9 * math.pi
        assert tail.max() < 1.1 * math.pi


def test_weight_growth_bound():
    """Mode weights grow at most like 1.15 pi lam_n from mode 10 onward.

    Together with the gap window this is the second tested ingredient of
    the truncation certificate.
    """
    for nu in (-0.9, -0.5, 0.0, 2.0, 8.0, 15.0):
        for n in range(10, 151, 7):
            mode = eigen_mode(nu, n)
            assert mode.weight <= 1.15 * math.pi * mode.lam


def test_amplitude_envelope():
    """|J_nu(z)| sqrt(z) stays below 1.3 for z >= 1, nu in (-1, 16]."""
    zs = np.linspace(1.0, 120.0, 1201)
    for nu in (-0.99, -0.5, 0.0, 0.5, 1.0, 2.7, 6.0, 11.0, 16.0):
        vals = np.abs(bessel_j(nu, zs)) * np.sqrt(zs)
        assert vals.max() <= 1.3


def test_small_argument_envelope():
    """z^(-nu) |J_nu(z)| <= 2^(-nu) (1 + 0.35/(nu+1)) / Gamma(nu+1), z <= 1."""
    zs = np.linspace(1e-4, 1.0, 500)
    for nu in (-0.99, -0.5, 0.0, 0.5, 2.0, 6.0, 15.0):
        cap = 2.0 ** (-nu) * (1.0 + 0.35 / (nu + 1.0)) / math.gamma(nu + 1.0)
        vals = np.abs(bessel_j(nu, zs)) * zs ** (-nu)
        assert vals.max() <= cap


def test_eigen_mode_weight_closed_form():
    # at nu = 1/2 the modes are sin(n pi x): lam_n = n pi, weight n pi^2
    mode = eigen_mode(0.5, 3)
    assert abs(mode.lam - 3.0 * math.pi) < 1e-12
    assert abs(mode.weight - 3.0 * math.pi**2) < 1e-9
    assert mode.n == 3


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.7, 4.0, 11.0])
def test_i_scaled_against_mpmath(nu):
    for z in (1e-3, 0.1, 1.0, 8.0, 40.0, 200.0, 1500.0):
        ref = float(mp.exp(-z) * mp.besseli(nu, z))
        assert abs(bessel_i_scaled(nu, z) - ref) <= 5e-14 * abs(ref), (nu, z)


def test_i_scaled_half_integer_closed_forms():
    zs = np.linspace(0.05, 30.0, 301)
    upper = np.sqrt(2.0 / (np.pi * zs)) * 0.5 * (1.0 + np.exp(-2.0 * zs))
    lower = np.sqrt(2.0 / (np.pi * zs)) * 0.5 * (1.0 - np.exp(-2.0 * zs))
    assert np.allclose(bessel_i_scaled(-0.5, zs), upper, rtol=1e-13, atol=0)
    assert np.allclose(bessel_i_scaled(0.5, zs), lower, rtol=1e-13, atol=0)


def test_i_scaled_zero_argument():
    assert bessel_i_scaled(0.0, 0.0) == 1.0
    assert bessel_i_scaled(1.5, 0.0) == 0.0
    with pytest.raises(PoleError):
        bessel_i_scaled(-0.5, 0.0)


@pytest.mark.parametrize("bad_nu", [-1.0, -1.5, 30.5, math.nan, math.inf])
def test_order_domain_errors(bad_nu):
    with pytest.raises(DomainError):
        bessel_j(bad_nu, 1.0)
    with pytest.raises(DomainError):
        bessel_i_scaled(bad_nu, 1.0)
    with pytest.raises(DomainError):
        bessel_j_zero(bad_nu, 1)


def test_argument_domain_errors():
    with pytest.raises(DomainError):
        bessel_j(0.5, -0.1)
    with pytest.raises(DomainError):
        bessel_j(0.5, math.nan)
    with pytest.raises(DomainError):
        bessel_i_scaled(0.5, -2.0)


def test_zero_index_domain_errors():
    with pytest.raises(DomainError):
        bessel_j_zero(0.0, 0)
    with pytest.raises(DomainError):
        bessel_j_zero(0.0, -3)
    with pytest.raises(DomainError):
        bessel_j_zero(0.0, 2.5)
