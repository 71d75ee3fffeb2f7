import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_lattice import Band, Potential
from dirac_lattice._grid import theta_grid
from dirac_lattice.config import parse_config
from dirac_lattice.evolution import reflect_kernel, spectral_kernel
from dirac_lattice.fourier_series import direct_coefficients, series_coefficients
from dirac_lattice.jost import Side, jost_solution, scattering_coefficients, wronskian_profile

masses = st.floats(0.3, 2.0)
sites = st.dictionaries(st.integers(-4, 4), st.floats(-0.9, 0.9).filter(lambda q: abs(q) > 1e-3), max_size=4)
potentials = st.builds(lambda m, d: Potential(m, tuple(sorted(d.items()))), masses, sites)
bands = st.sampled_from(list(Band))

PROPS = settings(max_examples=30, deadline=None)


@PROPS
@given(potentials, bands)
def test_unitarity(pot, band):
    s = scattering_coefficients(pot, theta_grid(8), band)
    assert s.unitarity_defect().max() < 1e-10


@PROPS
@given(potentials, bands)
def test_wronskian_is_constant(pot, band):
    th = theta_grid(6)
    wp = jost_solution(pot, th, Side.PLUS, band, (-7, 7))
    wm = jost_solution(pot, th, Side.MINUS, band, (-7, 7))
    prof = wronskian_profile(wp, wm)
    assert np.max(np.abs(prof - prof[0]) / np.abs(prof[0])) < 1e-10


@PROPS
@given(potentials, st.floats(0.0, 30.0))
def test_mirror_symmetry_of_the_propagator(pot, t):
    ker = spectral_kernel(pot, t, (-6, 6))
    mirrored = spectral_kernel(pot.reflected(), t, (-6, 6))
    assert np.allclose(reflect_kernel(ker).matrix, mirrored.matrix, atol=1e-11)


@PROPS
@given(potentials, st.sampled_from(list(Side)))
def test_iteration_equals_direct_recursion(pot, side):
    it = series_coefficients(pot, side, (-5, 5))
    dr = direct_coefficients(pot, side, (-5, 5))
    for n in range(-5, 6):
        for a, b in ((it.A[n], dr.A[n]), (it.B[n], dr.B[n])):
            diff = a - b
            assert np.max(np.abs(diff.c), initial=0.0) <= 1e-10 * max(1.0, a.sup())


@PROPS
@given(potentials, st.integers(8, 16), st.sampled_from(["exact", "spectral", "both"]))
def test_config_text_round_trip(pot, log2, route):
    lines = [f"mass = {pot.m!r}", f"grid_log2 = {log2}", f"route = {route}"]
    lines += [f"site = ({n}, {q!r})" for n, q in reversed(pot.support)]
    cfg = parse_config("\n".join(lines))
    assert cfg.potential_obj() == pot
    assert cfg.grid_log2 == log2 and cfg.route == route
    assert parse_config("\n".join(reversed(lines))).hash == cfg.hash
