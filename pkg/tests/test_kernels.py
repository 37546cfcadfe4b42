"""Tests for the series kernel, densities, comparators, and image sums.

The strongest oracle is the pair of closed-form image sums at order
-1/2, which share nothing with the eigenfunction series except the
arithmetic; mpmath covers the free density.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from bessel_heat import (
    BesselHeatError,
    DomainError,
    IllConditionedError,
    PoleError,
)
from bessel_heat.kernels import (
    comparator_free,
    comparator_killed,
    comparator_main,
    comparator_reflected,
    eigen_series_kernel,
    eigen_series_kernel_grid,
    free_density,
    hunt_remainder,
    images_dirichlet,
    images_dirichlet_interval,
    images_neumann_dirichlet,
    killed_density,
    reflected_density,
)

mp.mp.dps = 30


@pytest.mark.parametrize("t", [0.1, 0.4, 1.0, 3.0])
def test_series_matches_neumann_dirichlet_images(t):
    """Order -1/2 closed form: the series at t equals the image sum at 2t."""
    for x in (0.05, 0.3, 0.5, 0.85):
        for y in (0.1, 0.6, 0.95):
            a = eigen_series_kernel(-0.5, t, x, y).value
            b = images_neumann_dirichlet(2.0 * t, x, y)
            assert abs(a - b) <= 1e-12 * abs(b)


@pytest.mark.parametrize("t", [0.1, 0.4, 1.0, 3.0])
def test_killed_density_matches_dirichlet_images(t):
    for x in (0.05, 0.3, 0.5, 0.85):
        for y in (0.1, 0.6, 0.95):
            a = killed_density(-0.5, t, x, y).value
            b = images_dirichlet(t, x, y)
            assert abs(a - b) <= 1e-12 * abs(b)


def test_images_interval_brownian_scaling():
    """p on (0, L) is (1/L) p on (0, 1) at rescaled arguments."""
    L, t, x, y = 2.0, 0.7, 0.8, 1.3
    a = images_dirichlet_interval(0.0, L, t, x, y)
    b = images_dirichlet_interval(0.0, 1.0, t / L**2, x / L, y / L) / L
    assert abs(a - b) <= 1e-13 * abs(b)


@pytest.mark.parametrize(
    "nu,t", [(-0.9, 0.1), (-0.5, 0.05), (0.0, 0.03), (1.7, 0.02), (15.0, 0.001)]
)
def test_tail_bound_is_honest(nu, t):
    """A coarse-tolerance value differs from a sharp one by at most its
    own certified tail bound."""
    for x, y in ((0.2, 0.7), (0.5, 0.5), (0.9, 0.1)):
        coarse = eigen_series_kernel(nu, t, x, y, eps=1e-6)
        sharp = eigen_series_kernel(nu, t, x, y, eps=1e-14)
        slack = 1e-13 * max(abs(coarse.value), abs(sharp.value))
        assert abs(coarse.value - sharp.value) <= coarse.tail_bound + slack
        assert coarse.terms_used <= sharp.terms_used


def test_series_symmetric_in_x_y():
    for nu in (-0.5, 0.3, 2.0):
        a = eigen_series_kernel(nu, 0.2, 0.3, 0.8)
        b = eigen_series_kernel(nu, 0.2, 0.8, 0.3)
        assert a.value == b.value


def test_series_vanishes_at_right_boundary():
    out = eigen_series_kernel(0.7, 0.5, 1.0, 0.4)
    assert out.value == 0.0 and out.terms_used == 0 and out.tail_bound == 0.0
    assert eigen_series_kernel(0.7, 0.5, 0.4, 1.0).value == 0.0


def test_grid_matches_scalar_evaluation():
    xs = np.array([0.1, 0.45, 0.8])
    ys = np.array([0.2, 0.65])
    grid = eigen_series_kernel_grid(0.3, 0.4, xs, ys)
    assert grid.value.shape == (3, 2)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            single = eigen_series_kernel(0.3, 0.4, float(x), float(y))
            assert abs(grid.value[i, j] - single.value) <= 1e-12 * abs(single.value)
            assert grid.tail_bound[i, j] <= 1e-10 * abs(single.value)


def test_conditioning_floor_refusal_and_flag():
    with pytest.raises(IllConditionedError):
        eigen_series_kernel(0.0, 1e-3, 0.4, 0.6)
    # lowering the floor computes anyway but flags the result
    out = eigen_series_kernel(0.0, 1e-3, 0.4, 0.6, t_floor=0.0)
    assert out.ill_conditioned is True
    ok = eigen_series_kernel(0.0, 0.5, 0.4, 0.6)
    assert ok.ill_conditioned is False


def test_reflected_density_is_half_time_series():
    a = reflected_density(0.3, 0.8, 0.25, 0.7)
    b = eigen_series_kernel(0.3, 0.4, 0.25, 0.7)
    assert a.value == b.value


def test_killed_density_prefactor():
    mu, t, x, y = -0.7, 0.6, 0.3, 0.55
    base = eigen_series_kernel(0.7, 0.3, x, y)
    out = killed_density(mu, t, x, y)
    pref = (x * y) ** 1.4
    assert abs(out.value - pref * base.value) <= 1e-14 * abs(out.value)
    with pytest.raises(DomainError):
        killed_density(0.3, t, x, y)


@pytest.mark.parametrize(
    "nu,t,x,y",
    [(-0.5, 1.0, 1.0, 1.0), (0.5, 1.0, 1.0, 1.0), (0.0, 0.5, 0.2, 1.7),
     (2.3, 2.0, 3.0, 0.4), (-0.9, 0.3, 0.05, 0.08), (4.0, 1.0, 0.0, 1.2)],
)
def test_free_density_against_mpmath(nu, t, x, y):
    if x == 0.0:
        ref = mp.exp(-y * y / (2 * t)) / (
            2**nu * mp.mpf(t) ** (nu + 1) * mp.gamma(nu + 1)
        )
    else:
        ref = (
            (mp.mpf(x) * y) ** (-nu) / t
            * mp.exp(-(x * x + y * y) / (2 * t))
            * mp.besseli(nu, x * y / t)
        )
    val = free_density(nu, t, x, y)
    assert abs(val - float(ref)) <= 1e-12 * float(ref)


def test_free_density_closed_forms_at_half_integer():
    # upper sign: reflecting Brownian motion, lower: killed
    val = free_density(-0.5, 1.0, 1.0, 1.0)
    ref = (1.0 + math.exp(-2.0)) / math.sqrt(2.0 * math.pi)
    assert abs(val - ref) < 1e-14
    val = free_density(0.5, 1.0, 1.0, 1.0)
    ref = math.sqrt(2.0 / math.pi) * math.exp(-1.0) * math.sinh(1.0)
    assert abs(val - ref) < 1e-14


def test_free_density_origin_behavior():
    assert abs(free_density(0.0, 1.0, 0.0, 0.0) - 1.0) < 1e-14
    assert free_density(1.0, 0.5, 0.0, 0.0) > 0.0
    with pytest.raises(PoleError):
        free_density(-0.3, 1.0, 0.0, 0.0)


def test_hunt_remainder_nonnegative_and_ordered():
    """free = reflected + remainder with remainder >= 0 pointwise."""
    for nu in (-0.5, 0.0, 1.2):
        for t in (0.05, 0.3, 1.0):
            for x, y in ((0.2, 0.3), (0.5, 0.5), (0.7, 0.2)):
                r = hunt_remainder(nu, t, x, y)
                assert r.value >= 0.0
                free = free_density(nu, t, x, y)
                refl = reflected_density(nu, t, x, y)
                assert refl.value <= free + refl.tail_bound
                assert abs(free - refl.value - r.value) <= r.tail_bound + 1e-15


def test_hunt_remainder_small_when_boundary_far():
    r = hunt_remainder(0.5, 0.02, 0.3, 0.35)
    free = free_density(0.5, 0.02, 0.3, 0.35)
    assert r.value < 1e-8 * free


def test_comparator_main_formula_spot_value():
    # direct hand evaluation at nu = -1/2 where lam_1 = pi/2
    val = comparator_main(-0.5, 1.0, 0.5, 0.5)
    ref = 2.0**1.5 * 0.25 * math.exp(-((math.pi / 2.0) ** 2))
    assert abs(val - ref) < 1e-12 * ref
    assert comparator_main(-0.5, 1.0, 0.3, 0.7) == comparator_main(-0.5, 1.0, 0.7, 0.3)


def test_comparator_main_boundary_factor_linear():
    t, y = 0.5, 0.4
    near = comparator_main(0.0, t, 1.0 - 1e-6, y)
    half = comparator_main(0.0, t, 1.0 - 5e-7, y)
    assert abs(half / near - 0.5) < 1e-3


def test_comparator_killed_index_reflection():
    # mu >= 0 reduces to the reflected comparator; negative mu picks up
    # the power prefactor
    t, x, y = 0.5, 0.3, 0.7
    assert comparator_killed(0.5, t, x, y) == comparator_reflected(0.5, t, x, y)
    a = comparator_killed(-0.5, t, x, y)
    b = (x * y) * comparator_killed(0.5, t, x, y)
    assert abs(a - b) < 1e-15 * a


def test_comparator_bands_sane():
    """Kernel / comparator stays within a moderate two-sided band."""
    for nu in (-0.5, 0.0, 1.5):
        for t in (0.1, 1.0, 5.0):
            for x, y in ((0.2, 0.6), (0.5, 0.5), (0.9, 0.3)):
                ratio = eigen_series_kernel(nu, t, x, y).value / comparator_main(
                    nu, t, x, y
                )
                assert 1e-3 < ratio < 1e3
                ratio = reflected_density(nu, t, x, y).value / comparator_reflected(
                    nu, t, x, y
                )
                assert 1e-3 < ratio < 1e3


def test_comparator_free_band():
    for nu in (-0.5, 0.3, 2.0):
        for t in (0.1, 1.0, 4.0):
            for x, y in ((0.3, 0.4), (1.5, 2.0), (4.0, 0.1)):
                ratio = free_density(nu, t, x, y) / comparator_free(nu, t, x, y)
                assert 0.05 < ratio < 20.0


def test_domain_errors():
    with pytest.raises(DomainError):
        eigen_series_kernel(16.0, 0.5, 0.3, 0.4)
    with pytest.raises(DomainError):
        eigen_series_kernel(0.0, -0.5, 0.3, 0.4)
    with pytest.raises(DomainError):
        eigen_series_kernel(0.0, 0.5, -0.1, 0.4)
    with pytest.raises(DomainError):
        eigen_series_kernel(0.0, 0.5, 0.3, 1.2)
    with pytest.raises(DomainError):
        eigen_series_kernel(0.0, 0.5, 0.3, 0.4, eps=0.9)
    with pytest.raises(DomainError):
        free_density(0.0, 0.5, -1.0, 0.4)


def test_grid_rejects_bad_nodes():
    with pytest.raises(DomainError):
        eigen_series_kernel_grid(0.0, 0.5, np.array([0.2, math.nan]), np.array([0.3]))
    with pytest.raises(DomainError):
        eigen_series_kernel_grid(0.0, 0.5, np.array([]), np.array([0.3]))


def test_hunt_remainder_consistency_guard():
    """The remainder construction rejects a negative free-minus-reflected
    gap beyond the certified tail; within it the value clamps to zero."""
    r = hunt_remainder(-0.5, 1e-2, 0.2, 0.8)
    assert r.value >= 0.0
    assert isinstance(r.value, float)
    # no BesselHeatError raised: the identity held within certificates
    assert not isinstance(r, BesselHeatError)
