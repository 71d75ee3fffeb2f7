import numpy as np
import pytest

from conftest import corpus
from dirac_lattice import Band, DomainError, Potential, truncated_matrix
from dirac_lattice._grid import theta_grid
from dirac_lattice.jost import (Edge, Side, bound_states, detect_resonance, jost_solution, laurent_wronskian,
                                resolvent_kernel, scattering_coefficients, wronskian_profile)
from dirac_lattice.potential import apply_dirac

M = 1.0
SAMPLE = Potential(M, ((0, 0.5), (1, -0.3), (3, 0.2)))


@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("band", list(Band))
def test_jost_solves_the_equation(side, band):
    th = np.array([0.3, 1.1, -2.0, 2.9])
    w = jost_solution(SAMPLE, th, side, band, (-6, 9))
    du, dv = apply_dirac(SAMPLE, w.u, w.v, -6)
    assert np.allclose(du, w.lam * w.u[1:-1], atol=1e-12)
    assert np.allclose(dv, w.lam * w.v[1:-1], atol=1e-12)


@pytest.mark.parametrize("band", list(Band))
def test_jost_is_a_plane_wave_beyond_the_support(band):
    th = np.array([0.4, 2.2])
    z = np.exp(1j * th)
    wp = jost_solution(SAMPLE, th, Side.PLUS, band, (5, 8))
    wm = jost_solution(SAMPLE, th, Side.MINUS, band, (-5, -2))
    assert np.allclose(wp.u[1:] / wp.u[:-1], z)
    assert np.allclose(wm.v[1:] / wm.v[:-1], 1 / z)


def test_free_scattering_is_trivial():
    s = scattering_coefficients(Potential.free(M), theta_grid(10))
    assert np.allclose(s.T, 1.0, atol=1e-11)
    assert np.max(np.abs(s.R_plus)) < 1e-11 and np.max(np.abs(s.R_minus)) < 1e-11


@pytest.mark.parametrize("band", list(Band))
def test_unitarity_and_scattering_relation(band):
    for pot in corpus(5, 8):
        s = scattering_coefficients(pot, theta_grid(10), band)
        assert s.unitarity_defect().max() < 1e-11
        assert s.scattering_residual < 1e-10


def test_reality_symmetry_of_T():
    th = theta_grid(8)
    s = scattering_coefficients(SAMPLE, th)
    assert np.allclose(s.T[::-1], np.conj(s.T), atol=1e-13)


def test_wronskian_is_site_independent():
    th = theta_grid(9)
    wp = jost_solution(SAMPLE, th, Side.PLUS, Band.POSITIVE, (-8, 10))
    wm = jost_solution(SAMPLE, th, Side.MINUS, Band.POSITIVE, (-8, 10))
    prof = wronskian_profile(wp, wm)
    assert np.max(np.abs(prof - prof[0]) / np.abs(prof[0])) < 1e-12


def test_grid_must_avoid_band_edges():
    with pytest.raises(DomainError):
        scattering_coefficients(SAMPLE, np.array([0.0, 0.5]))


def test_bound_states_match_the_truncated_spectrum():
    pot = Potential(M, ((0, 2.5), (1, 2.5)))
    states = bound_states(pot)
    lams = sorted(s.lam for s in states)
    ev = np.linalg.eigvalsh(truncated_matrix(pot, 80))
    outside = sorted(e for e in ev if abs(e) < M - 1e-6 or abs(e) > np.sqrt(4 + M * M) + 1e-6)
    assert np.allclose(lams, outside, atol=1e-10)
    assert np.allclose(sorted(lams), sorted(-x for x in lams))
    for s in states:
        assert -1 < s.z < 0 and s.gamma_plus > 0 and s.gamma_minus > 0
        assert abs(laurent_wronskian(pot, s.z)) < 1e-10


def test_bound_state_norming_constant_matches_residue_of_T():
    pot = SAMPLE
    (pos,) = [s for s in bound_states(pot) if s.lam > 0]
    # T as a function of z near z_l: residue from a small circle
    r = 1e-4 * abs(pos.z)
    phi = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    z = pos.z + r * np.exp(1j * phi)
    P = np.array([laurent_wronskian(pot, zz) for zz in z])
    T = (z - 1 / z) / P
    res = np.mean(T * r * np.exp(1j * phi))
    assert abs(res.real * pos.kappa / pos.z) == pytest.approx(pos.gamma_plus, rel=1e-6)


def test_lower_edge_is_resonant_for_every_potential():
    for pot in corpus(11, 6):
        rep = detect_resonance(pot, Edge.LOWER)
        assert rep.is_resonant and rep.abs_W == 0.0
        assert np.max(np.abs(rep.witness.v)) < 1e-14
        assert abs(laurent_wronskian(pot, 1.0)) < 1e-12


def test_upper_edge_verdicts():
    assert detect_resonance(Potential.free(M), Edge.UPPER).is_resonant
    rep = detect_resonance(Potential(M, ((0, 0.5),)), Edge.UPPER, Band.NEGATIVE)
    assert not rep.is_resonant and rep.abs_W > 1e-4


@pytest.mark.parametrize("lam", [1.4, -1.9])
@pytest.mark.parametrize("sign", [1, -1])
def test_resolvent_kernel_inverts_the_operator(lam, sign):
    pot = SAMPLE
    k = 1
    n_lo, n_hi = -6, 8
    cols = np.array([[resolvent_kernel(pot, lam, sign, n, k)[:, b] for n in range(n_lo, n_hi + 1)] for b in (0, 1)])
    for b in (0, 1):
        u, v = cols[b][:, 0], cols[b][:, 1]
        du, dv = apply_dirac(pot, u, v, n_lo)
        ru, rv = du - lam * u[1:-1], dv - lam * v[1:-1]
        delta_u = np.zeros_like(ru)
        delta_v = np.zeros_like(rv)
        (delta_u if b == 0 else delta_v)[k - n_lo - 1] = 1.0
        assert np.allclose(ru, delta_u, atol=1e-12) and np.allclose(rv, delta_v, atol=1e-12)


def test_resolvent_limits_are_complex_conjugate_and_symmetric():
    plus = resolvent_kernel(SAMPLE, 1.5, 1, -2, 3)
    minus = resolvent_kernel(SAMPLE, 1.5, -1, -2, 3)
    assert np.allclose(plus, np.conj(minus))
    assert np.allclose(resolvent_kernel(SAMPLE, 1.5, 1, 3, -2), plus.T)


def test_resolvent_matches_dense_inverse_off_the_axis():
    pot = SAMPLE
    G = resolvent_kernel(pot, 1.7, 1, 0, 2)
    N = 1500
    D = truncated_matrix(pot, N)
    rhs = np.zeros((D.shape[0], 2))
    rhs[2 * (2 + N), 0] = rhs[2 * (2 + N) + 1, 1] = 1.0

    def dense(eps):
        sol = np.linalg.solve(D - (1.7 + 1j * eps) * np.eye(D.shape[0]), rhs)
        return sol[[2 * N, 2 * N + 1]]

    # first-order Richardson in the damping removes the O(eps) bias
    extrapolated = 2 * dense(4e-3) - dense(8e-3)
    assert np.allclose(extrapolated, G, atol=3e-3)
