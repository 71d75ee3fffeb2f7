"""Marchenko-type kernels built from reflection data, their equations, and ``T`` at the origin.

With ``F^+_s = [R^+]_{-s}`` and ``F^-_s = [R^-]_s`` (Fourier coefficients on
the unit circle) and bound states ``(z_l, gamma^+-_l)`` with ``lambda_l > 0``::

    calF^+_s = F^+_s + sum_l gamma^+_l z_l^s
    calF^-_s = F^-_s + sum_l gamma^-_l z_l^{-s}

Pairing the scattering relation ``T w^-+ = R^+- w^+- + w^+-(-theta)`` with
``z^{+-(n + j)}`` and averaging over the circle gives four linear
identities in the series coefficients (``B^-_n`` below is the minus-side b
polynomial, ``T0 = T(0)``, ``T0' = T'(0)`` in the variable z)::

    plus u, j >= 0:   d_j0 + a+_{n,j} + calF+_{2n+j} + sum_{p>=0} a+_{n,p} calF+_{2n+j+p}
                      = T0 (1 + a-_{n,0}) / (1 - q_n) d_j0
    plus v, j >= -1:  b+_{n,j} + d_{j,-1} - d_j0 + calF+_{2n+j-1} - calF+_{2n+j}
                      + sum_{p>=-1} b+_{n,p} calF+_{2n+j+p}
                      = (1 - q_n) [T (z - 1 + B-_n) z^j]_0
    minus u, j <= 0:  d_j0 + a-_{n,j} + calF-_{2n+j} + sum_{k<=0} a-_{n,k} calF-_{2n+j+k}
                      = (1 - q_n) T0 (1 + a+_{n,0}) d_j0
    minus v, j <= 0:  d_{j,-1} - d_j0 + b-_{n,j} + calF-_{2n+j-1} - calF-_{2n+j}
                      + sum_{k<=0} b-_{n,k} calF-_{2n+j+k}
                      = [T (z^{-1} - 1 + B+_n) z^{-j}]_0 / (1 - q_n)

The bound-state part of each left side is a geometric series that sums to a
Jost solution value at ``z_l``; it is evaluated in that closed form, since
the individual terms ``z_l^s`` overflow the available precision when
``|s|`` is large.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._grid import fourier_coefficients
from .fourier_series import SeriesCoeffs, default_k_max, series_coefficients
from .jost import NumericalFailure, ScatteringData, Side, bound_state_pair, bound_states, scattering_coefficients
from .laurent import ONE, Z, ZINV
from .potential import Potential
from .spectral_map import Band

RESONANCE_FLOOR = 1e-12


@dataclass
class GlmKernel:
    side: Side
    k: np.ndarray
    coeffs: np.ndarray
    bound: list = field(default_factory=list)
    states: list = field(default_factory=list)
    imag_residue: float = 0.0

    def F(self, s):
        """Reflection part ``F_s``."""
        s = np.asarray(s)
        idx = (-s if self.side is Side.PLUS else s) - self.k[0]
        ok = (idx >= 0) & (idx < len(self.k))
        out = np.zeros(s.shape)
        out[ok] = self.coeffs[idx[ok]]
        return out if out.ndim else float(out)

    def bound_part(self, s):
        s = np.asarray(s, dtype=float)
        sgn = 1 if self.side is Side.PLUS else -1
        total = np.zeros(s.shape)
        for z, g in self.bound:
            total = total + g * np.power(z, sgn * s)
        return total if total.ndim else float(total)

    def script_F(self, s):
        """``calF_s``; reflection plus bound-state exponentials."""
        return self.F(s) + self.bound_part(s)

    def parseval(self) -> float:
        return float(np.sum(self.coeffs**2))


def reflection_fourier(scat: ScatteringData, side) -> GlmKernel:
    """Reflection Fourier coefficients ``F^{side}`` from samples on the half-offset grid."""
    side = Side.coerce(side)
    if scat.band is not Band.POSITIVE:
        raise ValueError("kernels are built from positive-band data")
    R = scat.R_plus if side is Side.PLUS else scat.R_minus
    k, c = fourier_coefficients(R)
    imag = float(np.max(np.abs(c.imag)))
    return GlmKernel(side, k, c.real.copy(), imag_residue=imag)


def glm_kernel(pot: Potential, grid_log2: int = 12, scat: ScatteringData | None = None, states=None) -> dict:
    """Both kernels with bound states of positive energy."""
    from ._grid import theta_grid

    scat = scattering_coefficients(pot, theta_grid(grid_log2)) if scat is None else scat
    states = bound_states(pot) if states is None else states
    pos = [s for s in states if s.lam > 0]
    out = {}
    for side in (Side.PLUS, Side.MINUS):
        ker = reflection_fourier(scat, side)
        ker.bound = [(s.z, s.gamma_plus if side is Side.PLUS else s.gamma_minus) for s in pos]
        ker.states = pos
        out[side] = ker
    return out


# --------------------------------------------------------------------------- origin data


@dataclass
class OriginData:
    A_minus1: float
    A_0: float
    T0: float
    T0_prime: float
    probe: int


def _origin_polynomial(plus: SeriesCoeffs, minus: SeriesCoeffs, pot: Potential, n: int):
    """``(m + lambda) W`` as a Laurent polynomial in z from the coefficient polynomials at n, n+1."""
    a1, a2 = 1.0 - pot.q(n), 1.0 - pot.q(n + 1)
    first = (ONE + plus.A[n]).shift(-1) * (Z - ONE + minus.B[n + 1])
    second = ((ONE + minus.A[n]).shift(1) * (ZINV - ONE + plus.B[n + 1])) * (1.0 / (a1 * a2))
    return first - second


def t_at_origin(plus: SeriesCoeffs, minus: SeriesCoeffs, pot: Potential, n: int = 0) -> OriginData:
    """``A_k = -[z^k] (m + lambda) W``; then ``T(0) = 1/A_{-1}`` and ``T'(0) = -A_0 / A_{-1}^2``.

    The sign makes ``A_{-1} = 1`` for the free operator.
    """
    for c in (plus, minus):
        if not (c.n_lo <= n and n + 1 <= c.n_hi):
            raise ValueError(f"coefficients must cover sites {n} and {n + 1}")
    P = _origin_polynomial(plus, minus, pot, n)
    if P.lo < -1 and np.max(np.abs(P.coefs(P.lo, -2))) > 1e-12:
        raise NumericalFailure("(m + lambda) W has powers below z^-1")
    am1 = -float(P.coef(-1))
    a0 = -float(P.coef(0))
    if abs(am1) < RESONANCE_FLOOR:
        raise NumericalFailure(f"A_-1 = {am1:.3e}: resonance at lambda = m")
    return OriginData(am1, a0, 1.0 / am1, -a0 / am1**2, n)


# --------------------------------------------------------------------------- residuals


EQUATIONS = ("plus_u", "plus_v", "minus_u", "minus_v")


@dataclass
class GlmResidual:
    rows: list  # (n, j, equation, residual)

    def max(self, equation: str | None = None) -> float:
        vals = [abs(r) for (_, _, e, r) in self.rows if equation is None or e == equation]
        return max(vals) if vals else 0.0

    def per_equation(self) -> dict:
        return {e: self.max(e) for e in EQUATIONS}


def glm_residual(plus: SeriesCoeffs, minus: SeriesCoeffs, kernels: dict, pot: Potential, origin: OriginData,
                 n_range: tuple[int, int] = (-8, 8)) -> GlmResidual:
    """Left minus right side of the four identities for every n in ``n_range`` and every stored j."""
    kp, km = kernels[Side.PLUS], kernels[Side.MINUS]
    T0, T1 = origin.T0, origin.T0_prime
    Kp, Km = plus.k_max, minus.k_max
    rows = []
    for n in range(n_range[0], n_range[1] + 1):
        one_q = 1.0 - pot.q(n)
        ap = np.array([plus.a(n, p) for p in range(0, Kp + 1)])
        bp = np.array([plus.b(n, p) for p in range(-1, Kp + 1)])
        am = np.array([minus.a(n, k) for k in range(-Km, 1)])
        bm = np.array([minus.b(n, k) for k in range(-Km, 1)])
        pp = np.arange(0, Kp + 1)
        pv = np.arange(-1, Kp + 1)
        kk = np.arange(-Km, 1)
        bvals = [(s.z, s.gamma_plus, s.gamma_minus) + bound_state_pair(pot, s, n) for s in kp.states]

        for j in range(0, Kp + 1):
            lhs = (j == 0) + plus.a(n, j) + kp.F(2 * n + j) + ap @ kp.F(2 * n + j + pp)
            lhs += sum(gp * z ** (n + j) * up for z, gp, gm, up, Vp, um, Vm in bvals)
            rhs = T0 * (1 + minus.a(n, 0)) / one_q if j == 0 else 0.0
            rows.append((n, j, "plus_u", lhs - rhs))
        for j in range(-1, Kp + 1):
            lhs = plus.b(n, j) + (j == -1) - (j == 0) + kp.F(2 * n + j - 1) - kp.F(2 * n + j) + bp @ kp.F(2 * n + j + pv)
            lhs += sum(gp * z ** (n + j) * one_q * Vp for z, gp, gm, up, Vp, um, Vm in bvals)
            if j == 0:
                res = T0 * (minus.b(n, 0) - 1)
            elif j == -1:
                res = T0 * (1 + minus.b(n, -1)) + T1 * (minus.b(n, 0) - 1)
            else:
                res = 0.0
            rows.append((n, j, "plus_v", lhs - one_q * res))
        for j in range(-Km, 1):
            lhs = (j == 0) + minus.a(n, j) + km.F(2 * n + j) + am @ km.F(2 * n + j + kk)
            lhs += sum(gm * z ** (-n - j) * one_q * um for z, gp, gm, up, Vp, um, Vm in bvals)
            rhs = one_q * T0 * (1 + plus.a(n, 0)) if j == 0 else 0.0
            rows.append((n, j, "minus_u", lhs - rhs))
        for j in range(-Km, 1):
            lhs = (j == -1) - (j == 0) + minus.b(n, j) + km.F(2 * n + j - 1) - km.F(2 * n + j) + bm @ km.F(2 * n + j + kk)
            lhs += sum(gm * z ** (-n - j) * Vm for z, gp, gm, up, Vp, um, Vm in bvals)
            if j == 0:
                res = T0 * (plus.b(n, 0) - 1) + T1 * (1 + plus.b(n, -1))
            elif j == -1:
                res = T0 * (1 + plus.b(n, -1))
            else:
                res = 0.0
            rows.append((n, j, "minus_v", lhs - res / one_q))
    return GlmResidual(rows)


@dataclass
class GlmReport:
    kernels: dict
    origin: OriginData
    residual: GlmResidual
    plus: SeriesCoeffs
    minus: SeriesCoeffs
    states: list


def glm_pipeline(pot: Potential, n_range: tuple[int, int] = (-8, 8), grid_log2: int = 12) -> GlmReport:
    """Coefficients, kernels, origin data and residuals for one potential."""
    window = (n_range[0], n_range[1] + 1)
    plus = series_coefficients(pot, Side.PLUS, window, default_k_max(pot, Side.PLUS, window))
    minus = series_coefficients(pot, Side.MINUS, window, default_k_max(pot, Side.MINUS, window))
    states = bound_states(pot)
    kernels = glm_kernel(pot, grid_log2, states=states)
    origin = t_at_origin(plus, minus, pot, n=0 if window[0] <= 0 < window[1] else window[0])
    return GlmReport(kernels, origin, glm_residual(plus, minus, kernels, pot, origin, n_range), plus, minus, states)


__all__ = [
    "EQUATIONS", "GlmKernel", "GlmReport", "GlmResidual", "OriginData", "glm_kernel", "glm_pipeline",
    "glm_residual", "reflection_fourier", "t_at_origin",
]
