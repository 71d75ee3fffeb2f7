import numpy as np
import pytest

from conftest import corpus
from dirac_lattice import Potential
from dirac_lattice._grid import theta_grid
from dirac_lattice.fourier_series import series_coefficients
from dirac_lattice.glm import EQUATIONS, glm_kernel, glm_pipeline, reflection_fourier, t_at_origin
from dirac_lattice.jost import NumericalFailure, Side, bound_states, scattering_coefficients

M = 1.0
Q05 = Potential(M, ((0, 0.5),))


def _tail(pot, s, side):
    if side is Side.PLUS:
        return sum(abs(pot.q(p)) + abs(pot.q_tilde(p)) for p, _ in pot.support if p >= np.floor(s / 2))
    return sum(abs(pot.q(p)) + abs(pot.q_tilde(p)) for p, _ in pot.support if p <= np.ceil(s / 2))


def test_free_kernel_and_residuals_vanish():
    rep = glm_pipeline(Potential.free(M))
    for side in Side:
        assert np.max(np.abs(rep.kernels[side].coeffs)) < 1e-14
    assert rep.origin.A_minus1 == pytest.approx(1.0) and rep.origin.T0 == pytest.approx(1.0)
    assert rep.residual.max() < 1e-14


@pytest.mark.parametrize("side", list(Side))
def test_reflection_coefficients_are_real_and_satisfy_parseval(side):
    scat = scattering_coefficients(Q05, theta_grid(12))
    ker = reflection_fourier(scat, side)
    assert ker.imag_residue < 1e-11
    R = scat.R_plus if side is Side.PLUS else scat.R_minus
    assert ker.parseval() == pytest.approx(np.mean(np.abs(R) ** 2), abs=1e-10)
    assert ker.parseval() + np.mean(np.abs(scat.T) ** 2) == pytest.approx(1.0, abs=1e-9)
    assert ker.parseval() < 1


def test_kernel_without_bound_states_is_the_reflection_part():
    ker = glm_kernel(Q05)[Side.PLUS]
    assert not ker.bound
    s = np.arange(-20, 21)
    assert np.array_equal(ker.script_F(s), ker.F(s))


def test_only_positive_bound_states_enter():
    pot = Potential(M, ((0, 2.5), (1, 2.5)))
    states = bound_states(pot)
    ker = glm_kernel(pot, states=states)[Side.MINUS]
    assert len(ker.bound) == sum(s.lam > 0 for s in states) < len(states)


@pytest.mark.parametrize("side", list(Side))
def test_kernel_vanishes_beyond_the_support_and_obeys_the_envelope(side):
    for pot in [Q05] + corpus(5, 4):
        ker = glm_kernel(pot)[side]
        s = np.arange(0, 41) * int(side)
        vals = np.abs(ker.script_F(s))
        tails = np.array([_tail(pot, x, side) for x in s])
        assert np.max(vals[tails == 0], initial=0.0) < 1e-14
        if not ker.bound:
            assert np.max(vals[tails > 0] / tails[tails > 0], initial=0.0) < 1.0


def test_residuals_without_bound_states():
    pots = [Q05] + [p for p in corpus(99, 40) if not bound_states(p)][:5]
    for pot in pots:
        assert not bound_states(pot)
        res = glm_pipeline(pot).residual
        assert set(res.per_equation()) == set(EQUATIONS)
        assert res.max() < 1e-8


def test_residuals_with_bound_states():
    pots = [p for p in corpus(99, 60) if any(s.lam > 0 for s in bound_states(p))][:3]
    assert pots
    for pot in pots:
        assert glm_pipeline(pot).residual.max() < 1e-6


def test_origin_values_for_single_site():
    rep = glm_pipeline(Q05)
    o = rep.origin
    assert o.A_minus1 == pytest.approx(2.0, abs=1e-12)
    assert o.T0 == pytest.approx(0.5, abs=1e-12)
    assert o.T0_prime == pytest.approx(-o.A_0 / o.A_minus1**2)


def test_origin_is_probe_independent():
    for pot in [Q05] + corpus(17, 5):
        plus = series_coefficients(pot, Side.PLUS, (-2, 5))
        minus = series_coefficients(pot, Side.MINUS, (-2, 5))
        a = t_at_origin(plus, minus, pot, 0).A_minus1
        b = t_at_origin(plus, minus, pot, 3).A_minus1
        assert abs(a - b) <= 1e-11 * max(1.0, abs(a))


def test_origin_matches_mean_value_of_T():
    """Without bound states T is analytic in the disc, so its circle mean is its value at the centre."""
    scat = scattering_coefficients(Q05, theta_grid(12))
    assert np.mean(scat.T).real == pytest.approx(glm_pipeline(Q05).origin.T0, abs=1e-12)


def test_origin_needs_coefficients_at_both_sites():
    plus = series_coefficients(Q05, Side.PLUS, (0, 0))
    minus = series_coefficients(Q05, Side.MINUS, (0, 0))
    with pytest.raises(ValueError):
        t_at_origin(plus, minus, Q05, 0)


def test_vanishing_leading_coefficient_is_a_numerical_failure(monkeypatch):
    import dirac_lattice.glm as glm

    monkeypatch.setattr(glm, "RESONANCE_FLOOR", 10.0)
    with pytest.raises(NumericalFailure):
        glm_pipeline(Q05)
