import numpy as np
import pytest

from dirac_lattice.spectral_map import (Band, DomainError, band_edges, g, kappa, lambda_of_theta, lambda_of_z,
                                        max_group_velocity, phase_derivatives, stationary_points, theta0,
                                        theta_of_lambda)


def test_band_edges_and_endpoints():
    assert band_edges(Band.POSITIVE, 1.0) == (1.0, np.sqrt(5.0))
    assert band_edges("-", 1.0) == (-np.sqrt(5.0), -1.0)
    assert lambda_of_theta(0.0, Band.POSITIVE, 1.0) == pytest.approx(1.0)
    assert lambda_of_theta(np.pi, Band.NEGATIVE, 1.0) == pytest.approx(-np.sqrt(5.0))


def test_theta_of_lambda_inverts_on_both_bands():
    th = np.linspace(0.0, np.pi, 101)
    for band in Band:
        lam = lambda_of_theta(th, band, 0.7)
        assert np.allclose(theta_of_lambda(lam, 0.7), th, atol=1e-7)


def test_domain_errors():
    with pytest.raises(DomainError):
        theta_of_lambda(0.5, 1.0)
    with pytest.raises(DomainError):
        lambda_of_theta(0.3, Band.POSITIVE, 0.0)


def test_lambda_of_z_matches_theta_form():
    th = np.linspace(-3, 3, 13)
    assert np.allclose(lambda_of_z(np.exp(1j * th), 1.3).real, g(th, 1.3))


def test_kappa_closed_form_for_unit_mass():
    assert kappa(1.0) == pytest.approx((3 - np.sqrt(5)) / 2, abs=1e-15)
    assert np.sqrt(kappa(1.0)) == pytest.approx((np.sqrt(5) - 1) / 2, abs=1e-15)


@pytest.mark.parametrize("m", [0.3, 1.0, 2.5])
def test_theta0_is_the_fastest_group_velocity(m):
    th = np.linspace(0, np.pi, 200001)
    gp = np.sin(th) / g(th, m)
    assert th[np.argmax(gp)] == pytest.approx(theta0(m), abs=1e-4)
    assert gp.max() == pytest.approx(max_group_velocity(m), abs=1e-10)
    assert phase_derivatives(theta0(m), max_group_velocity(m), m, 1) == pytest.approx(0.0, abs=1e-14)
    assert phase_derivatives(theta0(m), max_group_velocity(m), m, 2) == pytest.approx(0.0, abs=1e-14)


def test_phase_derivatives_match_finite_differences():
    th, v, m, h = 0.7, 0.3, 1.2, 1e-4
    for order in (1, 2, 3):
        fd = (phase_derivatives(th + h, v, m, order - 1) - phase_derivatives(th - h, v, m, order - 1)) / (2 * h)
        assert fd == pytest.approx(phase_derivatives(th, v, m, order), abs=1e-7)
    with pytest.raises(ValueError):
        phase_derivatives(th, v, m, 4)


def test_stationary_point_counts():
    m = 1.0
    vmax = max_group_velocity(m)
    pts = stationary_points(0.5 * vmax, m)
    assert len(pts) == 2 and not any(p.degenerate for p in pts)
    for p in pts:
        assert phase_derivatives(p.theta, 0.5 * vmax, m, 1) == pytest.approx(0.0, abs=1e-12)
    deg = stationary_points(vmax, m)
    assert len(deg) == 1 and deg[0].degenerate
    assert stationary_points(1.1 * vmax, m) == []
    with pytest.raises(ValueError):
        stationary_points(-0.1, m)
