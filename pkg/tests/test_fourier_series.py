import numpy as np
import pytest

from conftest import corpus
from dirac_lattice import Band, Potential
from dirac_lattice._grid import theta_grid
from dirac_lattice.fourier_series import (coefficient_majorants, direct_coefficients, jost_h, negative_band,
                                          reconstruct_jost, recursion_residual, resonant_factorization,
                                          series_coefficients, wiener_norm)
from dirac_lattice.jost import Side

M = 1.0
SAMPLE = Potential(M, ((0, 0.5), (1, -0.3), (3, 0.2)))
WINDOW = (-5, 6)


def _polys_close(x, y, rtol):
    return all(np.max(np.abs((x[n] - y[n]).c), initial=0.0) <= rtol * max(1.0, x[n].sup()) for n in x)


@pytest.mark.parametrize("side", list(Side))
def test_iteration_matches_direct_recursion(side):
    for pot in [SAMPLE] + corpus(3, 6):
        it = series_coefficients(pot, side, WINDOW)
        dr = direct_coefficients(pot, side, WINDOW)
        assert _polys_close(it.A, dr.A, 1e-12) and _polys_close(it.B, dr.B, 1e-12)


def test_iteration_stops_after_finitely_many_layers():
    c = series_coefficients(SAMPLE, Side.PLUS, WINDOW)
    assert c.layers <= SAMPLE.width + 2
    assert c.layer_sups[-1] < 1e-15


@pytest.mark.parametrize("side", list(Side))
def test_free_coefficients_vanish(side):
    c = series_coefficients(Potential.free(M), side, WINDOW)
    assert np.all(c.table("a") == 0) and np.all(c.table("b") == 0)


@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("band", list(Band))
def test_series_reproduces_jost_solution(side, band):
    th = theta_grid(7)
    c = series_coefficients(SAMPLE, side, WINDOW)
    if band is Band.NEGATIVE:
        c = negative_band(c)
    assert c.truncation_loss() == 0.0
    u, v = reconstruct_jost(c, SAMPLE, th)
    hu, hv = jost_h(SAMPLE, th, side, band, WINDOW)
    assert np.max(np.abs(u - hu)) < 1e-11 and np.max(np.abs(v - hv)) < 1e-11


def test_too_small_cut_is_visible():
    c = series_coefficients(SAMPLE, Side.PLUS, WINDOW, k_max=1)
    assert c.truncation_loss() > 1e-3
    u, _ = reconstruct_jost(c, SAMPLE, theta_grid(6))
    hu, _ = jost_h(SAMPLE, theta_grid(6), Side.PLUS, Band.POSITIVE, WINDOW)
    assert np.max(np.abs(u - hu)) > 1e-4


@pytest.mark.parametrize("side", list(Side))
def test_closed_form_recursions_hold(side):
    for pot in [SAMPLE] + corpus(8, 5):
        c = series_coefficients(pot, side, (pot.lo - 3, pot.hi + 3))
        assert recursion_residual(c, pot)["max"] < 1e-12


def test_recursions_are_for_the_positive_band():
    with pytest.raises(ValueError):
        recursion_residual(negative_band(series_coefficients(SAMPLE, Side.PLUS, WINDOW)), SAMPLE)


def test_majorants_bound_the_coefficients():
    for pot in [SAMPLE] + corpus(77, 40):
        maj = coefficient_majorants(pot)
        c = series_coefficients(pot, Side.PLUS, (pot.lo - 4, pot.hi + 2))
        for n in range(c.n_lo, c.n_hi + 1):
            for k in range(0, c.k_max + 1):
                bound = maj.safe_bound(n, k)
                assert abs(c.a(n, k)) <= bound + 1e-13 and abs(c.b(n, k)) <= bound + 1e-13


def test_tighter_majorant_misses_the_top_site():
    pot = Potential(M, ((2, 0.4),))
    c = series_coefficients(pot, Side.PLUS, (1, 1))
    maj = coefficient_majorants(pot)
    assert c.b(1, 2) == pytest.approx(-(pot.q(2) + pot.q_tilde(2)))
    assert maj.coefficient_bound(1, 2) == 0.0 < maj.safe_bound(1, 2)


def test_wiener_norm_of_trigonometric_polynomial():
    th = theta_grid(8)
    seq = wiener_norm(2.0 + 3.0 * np.exp(2j * th) - 0.5 * np.exp(-5j * th))
    assert seq.norm == pytest.approx(5.5, abs=1e-12)
    assert seq.coefficient(2) == pytest.approx(3.0)
    assert seq.tail_mass < 1e-14
    with pytest.raises(ValueError):
        wiener_norm(np.ones(100))


def test_wiener_norm_flags_a_jump():
    for log2 in (8, 10, 12):
        assert wiener_norm(np.sign(theta_grid(log2))).tail_mass > 0.05


def test_transmission_has_finite_wiener_norm():
    from dirac_lattice.jost import scattering_coefficients

    norms = [wiener_norm(scattering_coefficients(SAMPLE, theta_grid(k)).T).norm for k in (10, 12)]
    assert norms[0] == pytest.approx(norms[1], rel=1e-8)


def test_free_factorization_removes_both_edges():
    f = resonant_factorization(Potential.free(M), ["lower", "upper"])
    assert f.divisor == "1 - z^2"
    assert f.min_abs > 0.5


def test_lower_edge_factorization_of_a_perturbation():
    pot = Potential(M, ((0, 0.5),))
    f = resonant_factorization(pot, "lower")
    assert f.min_abs > 1e-3
    with pytest.raises(ValueError):
        resonant_factorization(pot, "upper")


def test_factorization_is_smooth_through_the_removed_zero():
    pot = Potential(M, ((0, 0.5),))
    grid = np.array([-1e-3, -1e-6, 0.0, 1e-6, 1e-3])
    phi = resonant_factorization(pot, "lower", grid=grid).phi
    assert np.max(np.abs(np.diff(phi))) < 1e-2
