import numpy as np
import pytest

from dirac_lattice import InvalidPotentialError, Potential, truncated_matrix
from dirac_lattice.potential import apply_dirac, chain_position


def test_support_is_sorted_and_zeros_dropped():
    p = Potential(1.0, ((3, 0.2), (-1, 0.0), (0, -0.4)))
    assert p.support == ((0, -0.4), (3, 0.2))
    assert (p.lo, p.hi, p.width) == (0, 3, 4)
    assert p.q(1) == 0.0 and p.q_tilde(0) == pytest.approx(-0.4 / 1.4)


def test_free_potential():
    p = Potential.free(2.0)
    assert p.is_free and p.width == 0 and p.moment(2) == 0.0


def test_rejections():
    with pytest.raises(InvalidPotentialError):
        Potential(1.0, ((0, 1.0),))
    with pytest.raises(InvalidPotentialError):
        Potential(1.0, ((0, 0.1), (0, 0.2)))


def test_truncated_matrix_symmetric_and_spectrum_in_bands_for_free():
    D = truncated_matrix(Potential.free(1.0), 30)
    assert np.array_equal(D, D.T)
    ev = np.linalg.eigvalsh(D)
    assert np.all(np.abs(ev) <= np.sqrt(5.0) + 1e-12)


def test_chain_positions_interleave():
    n = np.array([-1, -1, 0, 0, 1, 1])
    c = np.array([1, 0, 1, 0, 1, 0])
    assert list(chain_position(n, c)) == [-2, -1, 0, 1, 2, 3]


def test_apply_dirac_matches_matrix():
    pot = Potential(1.0, ((0, 0.3), (2, -0.5)))
    N = 6
    D = truncated_matrix(pot, N)
    rng = np.random.default_rng(1)
    x = rng.normal(size=2 * (2 * N + 1))
    u, v = x[0::2], x[1::2]
    du, dv = apply_dirac(pot, u, v, -N)
    y = D @ x
    assert np.allclose(du, y[0::2][1:-1]) and np.allclose(dv, y[1::2][1:-1])


def test_reflection_conjugates_the_operator():
    pot = Potential(0.8, ((-1, 0.3), (2, -0.6)))
    N = 8
    D = truncated_matrix(pot, N)
    Dr = truncated_matrix(pot.reflected(), N)
    # truncated chain runs over positions -2N..2N+1; p -> 1 - p reverses it
    size = D.shape[0]
    pos = np.arange(-2 * N, 2 * N + 2)
    idx_of = {p: 2 * (p // 2 + N) + (0 if p % 2 else 1) for p in pos}
    P = np.zeros((size, size))
    for p in pos:
        P[idx_of[1 - p], idx_of[p]] = (-1.0) ** p
    assert np.allclose(Dr, -P @ D @ P.T)
