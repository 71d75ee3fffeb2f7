"""Finitely supported potentials and the lattice Dirac operator they define.

Componentwise, ``D w = lambda w`` reads::

    m u_n + v_{n+1} - (1 - q_n) v_n = lambda u_n
    u_{n-1} - (1 - q_n) u_n - m v_n = lambda v_n

Ordering the unknowns as ``..., v_n, u_n, v_{n+1}, u_{n+1}, ...`` turns D
into a Jacobi matrix with diagonal ``-m, +m`` alternating and off-diagonal
entries ``-(1 - q_n)`` (between ``v_n`` and ``u_n``) and ``1`` (between
``u_n`` and ``v_{n+1}``).  Chain position of ``u_n`` is ``2n + 1``, of
``v_n`` is ``2n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral_map import check_mass

Q_ONE_TOL = 1e-12


class InvalidPotentialError(ValueError):
    pass


@dataclass(frozen=True)
class Potential:
    m: float
    support: tuple[tuple[int, float], ...] = ()
    _q: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "m", check_mass(self.m))
        q = {}
        for site, value in self.support:
            site, value = int(site), float(value)
            if site in q:
                raise InvalidPotentialError(f"site {site} given twice")
            if abs(1.0 - value) < Q_ONE_TOL:
                raise InvalidPotentialError(f"q_{site} = 1 is not allowed (division by 1 - q_n)")
            if value != 0.0:
                q[site] = value
        object.__setattr__(self, "support", tuple(sorted(q.items())))
        object.__setattr__(self, "_q", q)

    @classmethod
    def free(cls, m: float) -> "Potential":
        return cls(m)

    @classmethod
    def from_mapping(cls, m: float, q: dict) -> "Potential":
        return cls(m, tuple(q.items()))

    @property
    def is_free(self) -> bool:
        return not self._q

    @property
    def lo(self) -> int:
        return self.support[0][0] if self._q else 0

    @property
    def hi(self) -> int:
        return self.support[-1][0] if self._q else 0

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1 if self._q else 0

    def q(self, n: int) -> float:
        return self._q.get(int(n), 0.0)

    def q_tilde(self, n: int) -> float:
        qn = self.q(n)
        return qn / (1.0 - qn)

    def q_array(self, n_lo: int, n_hi: int) -> np.ndarray:
        return np.array([self.q(n) for n in range(n_lo, n_hi + 1)])

    def moment(self, k: int) -> float:
        """``sum_n (1 + |n|)^k |q_n|``, the weighted l^1 norm."""
        return float(sum((1 + abs(n)) ** k * abs(v) for n, v in self.support))

    def reflected(self) -> "Potential":
        """Potential ``q'_n = q_{-n}``.

        With ``U`` the chain map ``p -> 1 - p`` composed with the sign
        ``(-1)^p``, ``D(q') = -U D(q) U^{-1}``; this swaps ``u_n`` and
        ``v_{-n}``.
        """
        return Potential(self.m, tuple((-n, v) for n, v in self.support))


def chain_position(n, component):
    """Chain index of ``u_n`` (component 0) or ``v_n`` (component 1)."""
    return 2 * np.asarray(n) + 1 - np.asarray(component)


def truncated_matrix(pot: Potential, N: int) -> np.ndarray:
    """Dense D on sites ``-N..N`` with Dirichlet truncation.

    Rows/columns are ordered ``(u_{-N}, v_{-N}, u_{-N+1}, v_{-N+1}, ...)``,
    i.e. index ``2(n + N) + c`` for component ``c``.
    """
    size = 2 * (2 * N + 1)
    D = np.zeros((size, size))
    m = pot.m

    def iu(n):
        return 2 * (n + N)

    def iv(n):
        return 2 * (n + N) + 1

    for n in range(-N, N + 1):
        a = 1.0 - pot.q(n)
        D[iu(n), iu(n)] = m
        D[iv(n), iv(n)] = -m
        D[iu(n), iv(n)] = D[iv(n), iu(n)] = -a
        if n + 1 <= N:
            D[iu(n), iv(n + 1)] = D[iv(n + 1), iu(n)] = 1.0
    return D


def apply_dirac(pot: Potential, u: np.ndarray, v: np.ndarray, n_lo: int):
    """Apply D to a field given on ``n_lo..n_lo+len-1``; returns interior rows only.

    Row ``u`` at site n needs ``v_{n+1}`` and row ``v`` needs ``u_{n-1}``, so
    the result is defined for sites ``n_lo+1 .. n_lo+len-2`` (first axis).
    """
    m = pot.m
    n = np.arange(n_lo, n_lo + u.shape[0])
    a = (1.0 - np.array([pot.q(k) for k in n])).reshape((-1,) + (1,) * (u.ndim - 1))
    du = m * u[1:-1] + v[2:] - a[1:-1] * v[1:-1]
    dv = u[:-2] - a[1:-1] * u[1:-1] - m * v[1:-1]
    return du, dv
