"""Jost solutions, Wronskians, scattering data, bound states and resonances.

Jost solutions are built by marching the two-term lattice recursion away
from the free region.  Solving the component equations of ``D w = lambda w``
for the unknown at the far end gives::

    leftward  (side +):  v_n     = (v_{n+1} - (lambda - m) u_n) / (1 - q_n)
                         u_{n-1} = (lambda + m) v_n + (1 - q_n) u_n
    rightward (side -):  u_n     = (u_{n-1} - (lambda + m) v_n) / (1 - q_n)
                         v_{n+1} = (lambda - m) u_n + (1 - q_n) v_n

Both steps have unit determinant in the pair ``(u_n, v_{n+1})``, which is
why the Wronskian ``u^1_n v^2_{n+1} - u^2_n v^1_{n+1}`` does not depend on n.

On the positive band the free asymptotics are ``(1, (z^{-/+1} - 1)/(m + lambda)) z^{+/-n}``;
on the negative band ``((z^{+/-1} - 1)/(lambda - m), 1) z^{+/-n}`` which avoids
the vanishing ``m + lambda`` at ``lambda = -m``.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._grid import theta_grid
from .potential import InvalidPotentialError, Potential, chain_position, truncated_matrix
from .spectral_map import Band, DomainError, band_edges, lambda_of_theta, theta_of_lambda

W_FLOOR = 1e-13
SCAT_REL_TOL = 1e-10
BOUND_EPS = 1e-6
EDGE_TOL = 1e-10


class NumericalFailure(RuntimeError):
    pass


class EdgeDegeneracyWarning(UserWarning):
    pass


class Side(enum.IntEnum):
    PLUS = 1
    MINUS = -1

    @classmethod
    def coerce(cls, side) -> "Side":
        if isinstance(side, Side):
            return side
        if side in ("+", "plus", 1, "1"):
            return cls.PLUS
        if side in ("-", "minus", -1, "-1"):
            return cls.MINUS
        raise ValueError(f"unknown side {side!r}")


def boundary_spinor(z, lam, m: float, side, band):
    """Free asymptotic spinor multiplying ``z^{+/-n}``."""
    side, band = Side.coerce(side), Band.coerce(band)
    zs = z if side is Side.PLUS else 1.0 / z
    if band is Band.POSITIVE:
        return np.ones_like(lam * zs), (1.0 / zs - 1.0) / (m + lam)
    return (zs - 1.0) / (lam - m), np.ones_like(lam * zs)


def _march(pot: Potential, z, bu, bv, plus_coef, minus_coef, side: Side, n_lo: int, n_hi: int):
    """Core recursion on the extended range covering window and support.

    ``plus_coef`` stands for ``lambda + m`` and ``minus_coef`` for
    ``lambda - m``; passing ``1`` and ``lambda^2 - m^2`` yields the pair
    ``(u, (lambda + m) v)`` whose entries are Laurent polynomials in z.
    """
    e_lo = min(n_lo, pot.lo - 1)
    e_hi = max(n_hi, pot.hi + 1)
    shape = np.broadcast(z, bu, bv, plus_coef, minus_coef).shape
    size = e_hi - e_lo + 1
    dtype = np.result_type(z, bu, bv, plus_coef, minus_coef, float)
    u = np.empty((size,) + shape, dtype=dtype)
    v = np.empty((size,) + shape, dtype=dtype)
    idx = lambda n: n - e_lo  # noqa: E731

    if side is Side.PLUS:
        s = pot.hi
        for n in range(max(s, e_lo), e_hi + 1):
            u[idx(n)] = bu * z**n
        for n in range(max(s + 1, e_lo), e_hi + 1):
            v[idx(n)] = bv * z**n
        for n in range(min(s, e_hi - 1), e_lo - 1, -1):
            a = 1.0 - pot.q(n)
            v[idx(n)] = (v[idx(n + 1)] - minus_coef * u[idx(n)]) / a
            if n - 1 >= e_lo:
                u[idx(n - 1)] = plus_coef * v[idx(n)] + a * u[idx(n)]
    else:
        s = pot.lo
        for n in range(e_lo, min(s - 1, e_hi) + 1):
            u[idx(n)] = bu * z ** (-n)
        for n in range(e_lo, min(s, e_hi) + 1):
            v[idx(n)] = bv * z ** (-n)
        for n in range(max(s, e_lo + 1), e_hi + 1):
            a = 1.0 - pot.q(n)
            u[idx(n)] = (u[idx(n - 1)] - plus_coef * v[idx(n)]) / a
            if n + 1 <= e_hi:
                v[idx(n + 1)] = minus_coef * u[idx(n)] + a * v[idx(n)]
    sl = slice(idx(n_lo), idx(n_hi) + 1)
    return u[sl], v[sl]


@dataclass
class JostField:
    side: Side
    band: Band
    theta: np.ndarray
    lam: np.ndarray
    n_lo: int
    n_hi: int
    u: np.ndarray
    v: np.ndarray
    at_edge: bool = False

    def index(self, n: int) -> int:
        if not self.n_lo <= n <= self.n_hi:
            raise IndexError(f"site {n} outside window [{self.n_lo}, {self.n_hi}]")
        return n - self.n_lo

    def spinor(self, n: int):
        i = self.index(n)
        return self.u[i], self.v[i]

    def component(self, n, comp):
        """Value at chain sites: ``comp`` 0 for u, 1 for v (arrays broadcast)."""
        n = np.asarray(n)
        comp = np.asarray(comp)
        i = n - self.n_lo
        return np.where(comp[..., None] == 0 if self.u.ndim > 1 else comp == 0,
                        self.u[i], self.v[i])

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_lo, self.n_hi + 1)


def default_window(pot: Potential, pad: int = 2) -> tuple[int, int]:
    return pot.lo - pad, pot.hi + pad


def jost_solution(pot: Potential, theta, side, band=Band.POSITIVE, window=None) -> JostField:
    """Jost solution ``w^{side}`` on ``window = (n_lo, n_hi)`` for real ``theta`` (scalar or array)."""
    side, band = Side.coerce(side), Band.coerce(band)
    theta = np.asarray(theta, dtype=float)
    n_lo, n_hi = window if window is not None else default_window(pot)
    lam = lambda_of_theta(theta, band, pot.m)
    z = np.exp(1j * theta)
    bu, bv = boundary_spinor(z, lam, pot.m, side, band)
    u, v = _march(pot, z, bu, bv, lam + pot.m, lam - pot.m, side, n_lo, n_hi)
    edge = bool(np.any(np.isclose(np.sin(theta), 0.0, atol=1e-15)))
    return JostField(side, band, theta, lam, n_lo, n_hi, u, v, at_edge=edge)


def jost_at_z(pot: Potential, z, side, band=Band.POSITIVE, window=None) -> JostField:
    """Jost solution for ``z = exp(i theta)`` off the unit circle (real ``z`` in ``(-1, 0)`` gives real fields)."""
    side, band = Side.coerce(side), Band.coerce(band)
    z = np.asarray(z)
    lam2 = pot.m**2 + 2.0 - z - 1.0 / z
    lam = int(band) * np.sqrt(lam2 if np.all(np.isreal(lam2)) and np.all(np.real(lam2) >= 0) else lam2 + 0j)
    n_lo, n_hi = window if window is not None else default_window(pot)
    bu, bv = boundary_spinor(z, lam, pot.m, side, band)
    u, v = _march(pot, z, bu, bv, lam + pot.m, lam - pot.m, side, n_lo, n_hi)
    theta = -1j * np.log(z + 0j)
    return JostField(side, band, theta, lam, n_lo, n_hi, u, v)


def laurent_pair(pot: Potential, z, side, window=None):
    """``(u_n, (lambda + m) v_n)`` of the positive-band Jost solution; Laurent polynomials in z."""
    side = Side.coerce(side)
    z = np.asarray(z)
    n_lo, n_hi = window if window is not None else default_window(pot)
    zs = z if side is Side.PLUS else 1.0 / z
    bu = np.ones_like(z)
    bv = 1.0 / zs - 1.0
    return _march(pot, z, bu, bv, 1.0, 2.0 - z - 1.0 / z, side, n_lo, n_hi)


def wronskian(w1: JostField, w2: JostField, n: int):
    """``u^1_n v^2_{n+1} - u^2_n v^1_{n+1}``."""
    if w1.band is not w2.band or w1.theta.shape != w2.theta.shape or not np.allclose(w1.theta, w2.theta):
        raise ValueError("Wronskian of fields at different theta or band")
    i1, j1 = w1.index(n), w1.index(n + 1)
    i2, j2 = w2.index(n), w2.index(n + 1)
    return w1.u[i1] * w2.v[j2] - w2.u[i2] * w1.v[j1]


def wronskian_profile(w1: JostField, w2: JostField) -> np.ndarray:
    lo = max(w1.n_lo, w2.n_lo)
    hi = min(w1.n_hi, w2.n_hi) - 1
    return np.array([wronskian(w1, w2, n) for n in range(lo, hi + 1)])


def laurent_wronskian(pot: Potential, z, n: int | None = None):
    """``(m + lambda) W(z)`` from the Laurent pairs; real for real z."""
    n = (pot.lo + pot.hi) // 2 if n is None else n
    win = (n, n + 1)
    up, Vp = laurent_pair(pot, z, Side.PLUS, win)
    um, Vm = laurent_pair(pot, z, Side.MINUS, win)
    return up[0] * Vm[1] - um[0] * Vp[1]


# --------------------------------------------------------------------------- scattering


@dataclass
class BoundState:
    lam: float
    z: float
    kappa: float
    gamma_plus: float
    gamma_minus: float
    norm_plus: float
    norm_minus: float
    cross_product: float
    matrix_mismatch: float = float("nan")


@dataclass
class ScatteringData:
    theta: np.ndarray
    band: Band
    T: np.ndarray
    R_plus: np.ndarray
    R_minus: np.ndarray
    W: np.ndarray
    W_plus: np.ndarray
    W_minus: np.ndarray
    bound_states: list = field(default_factory=list)
    scattering_residual: float = 0.0

    def unitarity_defect(self) -> np.ndarray:
        """``max(| |T|^2 + |R^+|^2 - 1 |, | |T|^2 + |R^-|^2 - 1 |)`` per grid point."""
        t2 = np.abs(self.T) ** 2
        return np.maximum(np.abs(t2 + np.abs(self.R_plus) ** 2 - 1), np.abs(t2 + np.abs(self.R_minus) ** 2 - 1))


def _field_pair(pot: Potential, theta, band, window):
    wp = jost_solution(pot, theta, Side.PLUS, band, window)
    wm = jost_solution(pot, theta, Side.MINUS, band, window)
    return wp, wm


def scattering_coefficients(pot: Potential, theta=None, band=Band.POSITIVE, with_bound_states: bool = False,
                            check: bool = True) -> ScatteringData:
    """Transmission and reflection coefficients on a theta grid avoiding 0 and +-pi."""
    band = Band.coerce(band)
    theta = theta_grid() if theta is None else np.asarray(theta, dtype=float)
    if np.any(np.isclose(np.sin(theta), 0.0, atol=1e-14)):
        raise DomainError("scattering grid must avoid theta in {0, +-pi}")
    window = default_window(pot)
    n0 = window[0]
    wp, wm = _field_pair(pot, theta, band, window)
    wp_r, wm_r = _field_pair(pot, -theta, band, window)
    W = wronskian(wp, wm, n0)
    if np.min(np.abs(W)) < W_FLOOR:
        raise NumericalFailure(f"|W(theta)| = {np.min(np.abs(W)):.3e} at an interior grid point")
    # W^{+/-}(theta) = W(w^{-/+}(theta), w^{+/-}(-theta)); the mixed Wronskian pairs fields at opposite theta
    W_plus = wm.u[0] * wp_r.v[1] - wp_r.u[0] * wm.v[1]
    W_minus = wp.u[0] * wm_r.v[1] - wm_r.u[0] * wp.v[1]
    lam = wp.lam
    scale = (pot.m + lam) if band is Band.POSITIVE else (lam - pot.m)
    T = 2j * np.sin(theta) / (scale * W)
    R_plus = W_plus / W
    R_minus = -W_minus / W
    res = 0.0
    if check:
        res = max(
            _scattering_residual(T, R_plus, wm, wp, wp_r),
            _scattering_residual(T, R_minus, wp, wm, wm_r),
        )
        if res > SCAT_REL_TOL:
            raise NumericalFailure(f"scattering relation residual {res:.3e}")
    data = ScatteringData(theta, band, T, R_plus, R_minus, W, W_plus, W_minus, scattering_residual=res)
    if with_bound_states:
        data.bound_states = bound_states(pot)
    return data


def _scattering_residual(T, R, w_other, w_same, w_same_reflected) -> float:
    """Relative sup of ``T w^{-/+} - R w^{+/-} - w^{+/-}(-theta)`` over the window."""
    worst = 0.0
    for c in ("u", "v"):
        a = getattr(w_other, c)
        b = getattr(w_same, c)
        r = getattr(w_same_reflected, c)
        diff = T * a - R * b - r
        scale = np.maximum(np.abs(b).max(axis=0), np.abs(r).max(axis=0))
        worst = max(worst, float(np.max(np.abs(diff).max(axis=0) / scale)))
    return worst


# --------------------------------------------------------------------------- bound states


def _z_scan_points(eps: float = BOUND_EPS, n: int = 4000) -> np.ndarray:
    """Real z in (-1, 0) and (0, 1), refined geometrically toward the ends."""
    lin = np.linspace(eps, 1 - eps, n)
    geo = np.geomspace(eps, 0.5, n // 4)
    s = np.unique(np.concatenate([lin, geo, 1 - geo]))
    s = s[(s >= eps) & (s <= 1 - eps)]
    return np.concatenate([-s[::-1], s])


def bound_states(pot: Potential, cross_validate: bool = True, eps: float = BOUND_EPS) -> list[BoundState]:
    """Eigenvalues outside the closed bands with Jost data and norming constants.

    Zeros ``z_l`` of the real Laurent polynomial ``(m + lambda) W(z)`` on
    real z inside the unit disk give eigenvalue pairs ``+-lambda_l`` (the
    recursion only sees ``lambda^2``).  Both signs are returned.
    """
    if pot.is_free:
        return []
    zs = _z_scan_points(eps)
    P = laurent_wronskian(pot, zs)
    states = []
    for i in np.nonzero(np.sign(P[:-1]) * np.sign(P[1:]) < 0)[0]:
        a, b = zs[i], zs[i + 1]
        if a < 0 < b:
            continue
        zl = brentq(lambda x: float(laurent_wronskian(pot, x)), a, b, xtol=1e-16, rtol=1e-15, maxiter=200)
        if min(abs(zl + 1), abs(zl - 1)) < EDGE_TOL:
            warnings.warn(f"Wronskian zero at z={zl} within {EDGE_TOL} of a band edge", EdgeDegeneracyWarning)
        lam2 = pot.m**2 + 2.0 - zl - 1.0 / zl
        if lam2 <= pot.m**2:
            warnings.warn(f"Wronskian zero at z={zl} has lambda^2={lam2} inside the gap; ignored")
            continue
        for sign in (1.0, -1.0):
            states.append(_bound_state_data(pot, zl, sign * np.sqrt(lam2)))
    if cross_validate and states:
        N = max(200, 4 * pot.width + 100)
        ev = np.linalg.eigvalsh(truncated_matrix(pot, N))
        for s in states:
            s.matrix_mismatch = float(np.min(np.abs(ev - s.lam)))
            if s.matrix_mismatch > 1e-8:
                warnings.warn(f"bound state {s.lam} differs from truncated-matrix eigenvalue by {s.matrix_mismatch:.2e}")
    states.sort(key=lambda s: s.lam)
    return states


def _matching_site(pot: Potential) -> int:
    """Site where both Jost fields have crossed half the support; errors grow by ``|z|^{-2}`` per step."""
    return (pot.lo + pot.hi) // 2


def _bound_state_data(pot: Potential, zl: float, lam: float) -> BoundState:
    m = pot.m
    z = float(zl)
    c = _matching_site(pot)
    bu_p, bv_p = 1.0, (1.0 / z - 1.0) / (m + lam)
    bu_m, bv_m = 1.0, (z - 1.0) / (m + lam)
    # w^+ is trusted on [c, hi + 1], w^- on [lo - 1, c + 1]
    up, vp = _march(pot, z, bu_p, bv_p, lam + m, lam - m, Side.PLUS, c, pot.hi + 1)
    um, vm = _march(pot, z, bu_m, bv_m, lam + m, lam - m, Side.MINUS, pot.lo - 1, c + 1)
    ov_p = np.array([up[0], up[1], vp[0], vp[1]])
    ov_m = np.array([um[-2], um[-1], vm[-2], vm[-1]])
    kappa = float(ov_p @ ov_m / (ov_p @ ov_p))
    # tails: w^+ = (1, a_-) z^j beyond hi + 1, w^- = (1, a_+) z^{-j} below lo - 1
    right = (bu_p**2 + bv_p**2) * z ** (2 * (pot.hi + 2)) / (1.0 - z * z)
    left = (bu_m**2 + bv_m**2) * z ** (-2 * (pot.lo - 2)) / (1.0 - z * z)
    plus_part = float(up[1:] @ up[1:] + vp[1:] @ vp[1:] + right)
    minus_part = float(um[:-1] @ um[:-1] + vm[:-1] @ vm[:-1] + left)
    norm_p = plus_part + minus_part / kappa**2
    norm_m = kappa**2 * plus_part + minus_part
    gp = 2.0 * lam / ((m + lam) * norm_p)
    gm = 2.0 * lam / ((m + lam) * norm_m)
    return BoundState(float(lam), z, kappa, float(gp), float(gm), norm_p, norm_m, float(kappa * norm_p))


def bound_state_pair(pot: Potential, state: BoundState, n: int):
    """``(u^+_n, V^+_n, u^-_n, V^-_n)`` at ``z_l`` with ``V = (lambda + m) v``.

    Marching at ``|z| < 1`` amplifies rounding toward the far side, so each
    field is taken from the side where it is computed stably and the other
    follows from ``w^- = kappa w^+``.
    """
    z, k = state.z, state.kappa
    if n >= _matching_site(pot):
        up, Vp = laurent_pair(pot, z, Side.PLUS, (n, n))
        up, Vp = float(up[0]), float(Vp[0])
        return up, Vp, k * up, k * Vp
    um, Vm = laurent_pair(pot, z, Side.MINUS, (n, n))
    um, Vm = float(um[0]), float(Vm[0])
    return um / k, Vm / k, um, Vm


# --------------------------------------------------------------------------- resonances


class Edge(enum.Enum):
    LOWER = "lower"  # |lambda| = m, theta = 0
    UPPER = "upper"  # |lambda| = sqrt(4 + m^2), theta = pi

    @property
    def theta(self) -> float:
        return 0.0 if self is Edge.LOWER else np.pi

    @classmethod
    def coerce(cls, edge) -> "Edge":
        if isinstance(edge, Edge):
            return edge
        key = str(edge).lower()
        if key in ("lower", "m", "0", "inner"):
            return cls.LOWER
        if key in ("upper", "top", "pi", "outer"):
            return cls.UPPER
        raise ValueError(f"unknown edge {edge!r}")


@dataclass
class ResonanceReport:
    edge: Edge
    band: Band
    is_resonant: bool
    abs_W: float
    tolerance: float
    witness: JostField


def edge_wronskian(pot: Potential, edge, band=Band.POSITIVE):
    edge = Edge.coerce(edge)
    window = default_window(pot)
    wp, wm = _field_pair(pot, edge.theta, band, window)
    return wronskian(wp, wm, window[0]), wp


def detect_resonance(pot: Potential, edge, band=Band.POSITIVE, rel_tol: float = 1e-8, grid=None) -> ResonanceReport:
    """Resonance at a band edge iff ``|W(theta_edge)|`` is below ``rel_tol * median |W|``."""
    edge, band = Edge.coerce(edge), Band.coerce(band)
    grid = theta_grid(10) if grid is None else grid
    wp, wm = _field_pair(pot, grid, band, default_window(pot))
    scale = float(np.median(np.abs(wronskian(wp, wm, wp.n_lo))))
    W_edge, witness = edge_wronskian(pot, edge, band)
    tol = rel_tol * scale
    return ResonanceReport(edge, band, bool(abs(W_edge) < tol), float(abs(W_edge)), tol, witness)


# --------------------------------------------------------------------------- resolvent


def green_from_fields(wp: JostField, wm: JostField, W, n, a, k, b):
    """Kernel ``-psi^-(min) psi^+(max) / W`` between chain sites ``(n, a)`` and ``(k, b)``."""
    p, pp = chain_position(n, a), chain_position(k, b)
    if p <= pp:
        left, right = (n, a), (k, b)
    else:
        left, right = (k, b), (n, a)
    lm = (wm.u if left[1] == 0 else wm.v)[wm.index(left[0])]
    rp = (wp.u if right[1] == 0 else wp.v)[wp.index(right[0])]
    return -lm * rp / W


def limiting_theta(lam: float, sign: int, m: float) -> tuple[float, Band]:
    """Quasi-momentum representing ``lambda + sign * i0`` on its band."""
    band = Band.POSITIVE if lam > 0 else Band.NEGATIVE
    th = theta_of_lambda(lam, m)
    lo, hi = band_edges(band, m)
    if not lo < lam < hi:
        raise DomainError(f"lambda={lam} is not inside an open band")
    # Im(lambda) > 0 needs Im(lambda^2) of the sign of lambda, i.e. sin(theta) of that sign
    return (int(band) * int(np.sign(sign)) * th, band)


def resolvent_kernel(pot: Potential, lam: float, sign: int, n: int, k: int) -> np.ndarray:
    """2x2 block ``[(D - lambda -/+ i0)^{-1}]_{(n, a), (k, b)}`` for lambda inside a band."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    th, band = limiting_theta(lam, sign, pot.m)
    lo = min(n, k, pot.lo) - 2
    hi = max(n, k, pot.hi) + 2
    wp, wm = _field_pair(pot, th, band, (lo, hi))
    W = wronskian(wp, wm, lo)
    out = np.empty((2, 2), dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            out[a, b] = green_from_fields(wp, wm, W, n, a, k, b)
    return out


__all__ = [
    "BoundState", "Edge", "EdgeDegeneracyWarning", "InvalidPotentialError", "JostField", "NumericalFailure",
    "ResonanceReport", "ScatteringData", "Side", "bound_states", "boundary_spinor", "detect_resonance",
    "edge_wronskian", "jost_at_z", "jost_solution", "laurent_pair", "laurent_wronskian", "resolvent_kernel",
    "scattering_coefficients", "wronskian", "wronskian_profile",
]
