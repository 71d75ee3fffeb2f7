"""Fourier coefficients of Jost solutions, Wiener norms and edge factorizations.

With ``h^+_n = z^{-n} w^+_n`` and ``h^-_n = z^n w^-_n`` the positive-band
Jost solutions have the one-sided expansions::

    (h^+_n)_u            = 1 + sum_{k>=-1} a^+_{n,k} z^k
    (1 - q_n) (h^+_n)_v  = alpha_-(z) + sum_{k>=-1} b^+_{n,k} z^k / (lambda + m)
    (1 - q_n) (h^-_n)_u  = 1 + sum_{k<=1} a^-_{n,k} z^{-k}
    (h^-_n)_v            = alpha_+(z) + sum_{k<=1} b^-_{n,k} z^{-k} / (lambda + m)

For finite support the coefficient functions are Laurent polynomials. They
are obtained by iterating the Green-function fixed point layer by layer.
Each layer moves one support site further away, so the iteration stops
after at most ``width + 1`` layers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._grid import fourier_coefficients, theta_grid
from .jost import Edge, NumericalFailure, Side, detect_resonance, jost_solution, laurent_pair
from .laurent import LAM2, ONE, Z, ZINV, Laurent
from .potential import Potential
from .spectral_map import Band, lambda_of_theta

LAYER_TOL = 1e-15
MAX_LAYERS = 10_000


# --------------------------------------------------------------------------- coefficients


@dataclass
class SeriesCoeffs:
    """Coefficient polynomials ``A_n(z)``, ``B_n(z)`` for one side and band.

    Plus side stores powers ``z^k``; minus side stores powers ``z^{-k}`` so
    that ``a(n, k)`` always returns the coefficient with the index
    convention of the expansion above.  On the negative band ``a`` is the
    row divided by ``lambda - m`` and ``b`` the plain row.
    """

    side: Side
    band: Band
    n_lo: int
    n_hi: int
    k_max: int
    A: dict
    B: dict
    layers: int = 0
    layer_sups: list = field(default_factory=list)

    @property
    def k_range(self) -> tuple[int, int]:
        return (-1, self.k_max) if self.side is Side.PLUS else (-self.k_max, 1)

    def _power(self, k: int) -> int:
        return k if self.side is Side.PLUS else -k

    def a(self, n: int, k: int) -> float:
        p = self.A.get(n)
        return float(p.coef(self._power(k))) if p is not None else 0.0

    def b(self, n: int, k: int) -> float:
        p = self.B.get(n)
        return float(p.coef(self._power(k))) if p is not None else 0.0

    def table(self, which: str = "a") -> np.ndarray:
        """Array ``[n - n_lo, k - k_lo]`` over the window and ``k_range``."""
        get = self.a if which == "a" else self.b
        k_lo, k_hi = self.k_range
        return np.array([[get(n, k) for k in range(k_lo, k_hi + 1)] for n in range(self.n_lo, self.n_hi + 1)])

    def truncation_loss(self) -> float:
        """Largest coefficient dropped by the ``k_max`` cut."""
        k_lo, k_hi = self.k_range
        worst = 0.0
        for poly in list(self.A.values()) + list(self.B.values()):
            for i, c in enumerate(poly.c):
                k = self._power(poly.lo + i)
                if not k_lo <= k <= k_hi:
                    worst = max(worst, abs(c))
        return worst


def default_k_max(pot: Potential, side, n_range) -> int:
    """Large enough that no coefficient is cut for sites in ``n_range``."""
    side = Side.coerce(side)
    n_lo, n_hi = n_range
    reach = pot.hi - n_lo if side is Side.PLUS else n_hi - pot.lo
    return max(2 * pot.width + 8, 2 * reach + 4)


def _odd_powers(l: int) -> Laurent:
    """``sum_{j=1}^{l} z^{2j-1}``."""
    return Laurent.from_dict({2 * j - 1: 1.0 for j in range(1, l + 1)})


def _alternating(lo: int, hi: int) -> Laurent:
    """``sum_{j=lo}^{hi} (-z)^j``."""
    return Laurent.from_dict({j: float((-1) ** j) for j in range(lo, hi + 1)})


def _plus_map(pot: Potential, n: int, A: dict, B: dict, boundary: bool):
    """Right side of the plus-side fixed point at site n."""
    out_a, out_b = Laurent.zero(), Laurent.zero()
    for p, _ in pot.support:
        if p <= n:
            continue
        l = p - n
        q, qt = pot.q(p), pot.q_tilde(p)
        ua = A.get(p, Laurent.zero()) + (ONE if boundary else Laurent.zero())
        vb = B.get(p, Laurent.zero()) + ((ZINV - ONE) if boundary else Laurent.zero())
        out_a = out_a + q * (ua * _alternating(1, 2 * l - 1)) + qt * (vb * _odd_powers(l))
        out_b = out_b + q * (LAM2 * (ua * _odd_powers(l))) + qt * (vb * _alternating(0, 2 * l))
    return out_a, out_b


def _minus_map(pot: Potential, n: int, A: dict, B: dict, boundary: bool):
    """Right side of the minus-side fixed point at site n (mirror of the plus map)."""
    out_a, out_b = Laurent.zero(), Laurent.zero()
    for p, _ in pot.support:
        if p >= n:
            continue
        l = n - p
        q, qt = pot.q(p), pot.q_tilde(p)
        ua = A.get(p, Laurent.zero()) + (ONE if boundary else Laurent.zero())
        vb = B.get(p, Laurent.zero()) + ((Z - ONE) if boundary else Laurent.zero())
        # powers z^{-j} for j in [2(p-n), 0], z^{-2j-1} for j in [p-n, -1], z^{-j} for j in [2(p-n)+1, -1]
        even = Laurent.from_dict({-j: float((-1) ** j) for j in range(-2 * l, 1)})
        odd = Laurent.from_dict({-2 * j - 1: 1.0 for j in range(-l, 0)})
        alt = Laurent.from_dict({-j: float((-1) ** j) for j in range(-2 * l + 1, 0)})
        out_a = out_a + qt * (ua * even) + q * (vb * odd)
        out_b = out_b + qt * (LAM2 * (ua * odd)) + q * (vb * alt)
    return out_a, out_b


def series_coefficients(pot: Potential, side, n_range: tuple[int, int], k_max: int | None = None) -> SeriesCoeffs:
    """Positive-band coefficients ``a^{side}_{n,k}``, ``b^{side}_{n,k}`` by layered iteration.

    Layer 0 is the fixed-point map applied to the free spinor, layer j+1 the
    linear part applied to layer j.  Coefficients are summed over layers
    until a layer vanishes (sup below ``LAYER_TOL``).
    """
    side = Side.coerce(side)
    n_lo, n_hi = n_range
    if n_lo > n_hi:
        raise ValueError("empty n_range")
    if k_max is None:
        k_max = default_k_max(pot, side, n_range)
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    step = _plus_map if side is Side.PLUS else _minus_map
    # sites whose coefficients feed the window: the window itself and the support
    sites = sorted(set(range(n_lo, n_hi + 1)) | {p for p, _ in pot.support})
    total_a = {n: Laurent.zero() for n in sites}
    total_b = {n: Laurent.zero() for n in sites}
    layer_a, layer_b = {}, {}
    sups = []
    boundary = True
    for j in range(MAX_LAYERS):
        new_a, new_b = {}, {}
        for n in sites:
            new_a[n], new_b[n] = step(pot, n, layer_a, layer_b, boundary)
        sup = max((max(new_a[n].sup(), new_b[n].sup()) for n in sites), default=0.0)
        sups.append(sup)
        for n in sites:
            total_a[n] = total_a[n] + new_a[n]
            total_b[n] = total_b[n] + new_b[n]
        layer_a, layer_b, boundary = new_a, new_b, False
        if sup < LAYER_TOL:
            break
    else:
        raise NumericalFailure("coefficient iteration did not terminate")
    A = {n: total_a[n] for n in range(n_lo, n_hi + 1)}
    B = {n: total_b[n] for n in range(n_lo, n_hi + 1)}
    return SeriesCoeffs(side, Band.POSITIVE, n_lo, n_hi, k_max, A, B, layers=len(sups), layer_sups=sups)


def direct_coefficients(pot: Potential, side, n_range: tuple[int, int], k_max: int | None = None) -> SeriesCoeffs:
    """Same coefficients from the exact Laurent recursion for ``(u, (lambda + m) v)``."""
    side = Side.coerce(side)
    n_lo, n_hi = n_range
    if k_max is None:
        k_max = default_k_max(pot, side, n_range)
    lo, hi = min(n_lo, pot.lo - 1), max(n_hi, pot.hi + 1)
    u, V = {}, {}
    if side is Side.PLUS:
        s = pot.hi
        for n in range(s, hi + 2):
            u[n] = Laurent.monomial(n)
        for n in range(s + 1, hi + 2):
            V[n] = Laurent.monomial(n - 1) - Laurent.monomial(n)
        for n in range(s, lo - 1, -1):
            a = 1.0 - pot.q(n)
            V[n] = (V[n + 1] - LAM2 * u[n]) * (1.0 / a)
            u[n - 1] = V[n] + a * u[n]
        A = {n: u[n].shift(-n) - ONE for n in range(n_lo, n_hi + 1)}
        B = {n: (1.0 - pot.q(n)) * V[n].shift(-n) - (ZINV - ONE) for n in range(n_lo, n_hi + 1)}
    else:
        s = pot.lo
        for n in range(lo - 1, s):
            u[n] = Laurent.monomial(-n)
        for n in range(lo - 1, s + 1):
            V[n] = Laurent.monomial(1 - n) - Laurent.monomial(-n)
        for n in range(s, hi + 1):
            a = 1.0 - pot.q(n)
            u[n] = (u[n - 1] - V[n]) * (1.0 / a)
            V[n + 1] = LAM2 * u[n] + a * V[n]
        A = {n: (1.0 - pot.q(n)) * u[n].shift(n) - ONE for n in range(n_lo, n_hi + 1)}
        B = {n: V[n].shift(n) - (Z - ONE) for n in range(n_lo, n_hi + 1)}
    return SeriesCoeffs(side, Band.POSITIVE, n_lo, n_hi, k_max, A, B)


def negative_band(coeffs: SeriesCoeffs) -> SeriesCoeffs:
    """Negative-band coefficients from the positive-band ones.

    On the negative band the Jost solution is the positive-band solution
    times ``(z^{+/-1} - 1)/(lambda - m)``, so ``a`` picks up the factor
    ``z^{+/-1} - 1`` and ``b`` is divided by ``z - 1`` (exact because
    ``(lambda + m) v`` vanishes at ``z = 1`` on that branch).
    """
    if coeffs.band is not Band.POSITIVE:
        raise ValueError("expected positive-band coefficients")
    A, B = {}, {}
    for n in coeffs.A:
        if coeffs.side is Side.PLUS:
            A[n] = (Z - ONE) * coeffs.A[n]
            B[n] = (-1.0) * (coeffs.B[n] * Z).divide_by_z_minus_1()
        else:
            A[n] = (ZINV - ONE) * coeffs.A[n]
            B[n] = coeffs.B[n].divide_by_z_minus_1()
    return SeriesCoeffs(coeffs.side, Band.NEGATIVE, coeffs.n_lo, coeffs.n_hi, coeffs.k_max + 1, A, B,
                        layers=coeffs.layers, layer_sups=list(coeffs.layer_sups))


def reconstruct_jost(coeffs: SeriesCoeffs, pot: Potential, theta) -> tuple[np.ndarray, np.ndarray]:
    """``h_n(theta)`` on the coefficient window, shape ``(sites,) + theta.shape``.

    Only coefficients inside ``k_range`` enter, so a too small ``k_max``
    shows up as a mismatch against :func:`jost_solution`.
    """
    theta = np.asarray(theta, dtype=float)
    z = np.exp(1j * theta)
    m = pot.m
    lam = lambda_of_theta(theta, coeffs.band, m)
    k_lo, k_hi = coeffs.k_range
    ks = np.arange(k_lo, k_hi + 1)
    sgn = 1 if coeffs.side is Side.PLUS else -1
    basis = z[..., None] ** (sgn * ks)
    us, vs = [], []
    for n in range(coeffs.n_lo, coeffs.n_hi + 1):
        sa = basis @ np.array([coeffs.a(n, k) for k in ks])
        sb = basis @ np.array([coeffs.b(n, k) for k in ks])
        one_minus_q = 1.0 - pot.q(n)
        if coeffs.band is Band.POSITIVE:
            alpha = ((1.0 / z if sgn > 0 else z) - 1.0) / (m + lam)
            u_row, v_row = 1.0 + sa, alpha + sb / (m + lam)
        else:
            alpha = ((z if sgn > 0 else 1.0 / z) - 1.0) / (lam - m)
            u_row, v_row = alpha + sa / (lam - m), 1.0 + sb
        if sgn > 0:
            us.append(u_row)
            vs.append(v_row / one_minus_q)
        else:
            us.append(u_row / one_minus_q)
            vs.append(v_row)
    return np.array(us), np.array(vs)


def jost_h(pot: Potential, theta, side, band, n_range) -> tuple[np.ndarray, np.ndarray]:
    """``h_n = z^{-/+n} w_n`` from the Jost recursion, same layout as :func:`reconstruct_jost`."""
    side = Side.coerce(side)
    theta = np.asarray(theta, dtype=float)
    w = jost_solution(pot, theta, side, band, n_range)
    n = w.sites.reshape((-1,) + (1,) * theta.ndim)
    phase = np.exp(-int(side) * 1j * n * theta)
    return w.u * phase, w.v * phase


# --------------------------------------------------------------------------- explicit recursions


def _parity_terms(k: int, r: int) -> tuple[int, int]:
    """``(sigma, f)`` for the index pair ``(k, r)``: ``sigma`` is 1 for even ``k``, ``f`` is ``2r`` for odd ``k``, ``2r+1`` otherwise."""
    sigma = 1 if k % 2 == 0 else 0
    return sigma, (2 * r if k % 2 else 2 * r + 1)


def recursion_residual(coeffs: SeriesCoeffs, pot: Potential) -> dict:
    """Residuals of the closed-form coefficient equations.

    Plus side: the ``k = -1, 0`` relations and the ``k >= 1`` equations for
    ``a`` and ``b``.  Minus side: ``a^-_{n,0} = -b^-_{n,0} = sum_{p<n} qt_p (1 + a^-_{p,0})``
    and the vanishing of the ``k = 1`` terms.  Sums over p are exact because
    the support is finite; sites outside the coefficient window count as
    zero, so residuals are reported for sites whose dependencies lie inside.
    """
    if coeffs.band is not Band.POSITIVE:
        raise ValueError("explicit recursions are stated for the positive band")
    a, b = coeffs.a, coeffs.b
    sup_sites = [p for p, _ in pot.support]
    q, qt = pot.q, pot.q_tilde
    out = {}
    if coeffs.side is Side.PLUS:
        ns = [n for n in range(coeffs.n_lo, coeffs.n_hi + 1) if all(coeffs.n_lo <= p <= coeffs.n_hi for p in sup_sites if p > n)]
        r_low, r_a, r_b = [0.0], [0.0], [0.0]
        for n in ns:
            above = [p for p in sup_sites if p > n]
            r_low.append(abs(a(n, -1)))
            r_low.append(abs(a(n, 0) - b(n, -1)))
            r_low.append(abs(a(n, 0) - sum(qt(p) * (1 + b(p, -1)) for p in above)))
            r_low.append(abs(b(n, 0) + sum(q(p) * (1 + a(p, 0)) + qt(p) * (2 + b(p, -1) - b(p, 0)) for p in above)))
            for k in range(1, coeffs.k_max + 1):
                r_a.append(abs(a(n, k) - _a_rhs(pot, a, b, n, k, above)))
                r_b.append(abs(b(n, k) - _b_rhs(pot, a, b, n, k, above)))
        out["low"] = max(r_low)
        out["a_k"] = max(r_a)
        out["b_k"] = max(r_b)
    else:
        ns = [n for n in range(coeffs.n_lo, coeffs.n_hi + 1) if all(coeffs.n_lo <= p <= coeffs.n_hi for p in sup_sites if p < n)]
        r0, r1 = [0.0], [0.0]
        for n in ns:
            below = [p for p in sup_sites if p < n]
            rhs = sum(qt(p) * (1 + a(p, 0)) for p in below)
            r0.append(abs(a(n, 0) - rhs))
            r0.append(abs(b(n, 0) + rhs))
            r1.append(max(abs(a(n, 1)), abs(b(n, 1))))
        out["low"] = max(r0)
        out["k_one"] = max(r1)
    out["max"] = max(out.values())
    return out


def _a_rhs(pot, a, b, n, k, above) -> float:
    q, qt = pot.q, pot.q_tilde
    val = (-1) ** k * sum(q(p) + qt(p) for p in above if p >= n + 1 + k // 2)
    for r in range(0, k):
        val += (-1) ** (k + r) * sum(q(p) * a(p, r) for p in above if p >= n + 1 + (k - r) // 2)
    for r in range(-1, (k - 1) // 2 + 1):
        _, f = _parity_terms(k, r)
        val += sum(qt(p) * b(p, f) for p in above if p >= n - r + (k + 1) // 2)
    return val


def _b_rhs(pot, a, b, n, k, above) -> float:
    q, qt = pot.q, pot.q_tilde
    sigma, _ = _parity_terms(k, 0)
    val = (-1) ** (k + 1) * sum(2 * (q(p) + qt(p)) for p in above if p >= n + (k + 1) // 2)
    if sigma:
        val += q(n + k // 2) + qt(n + k // 2)
    for r in range(0, k):
        val += (-1) ** (k + r + 1) * sum(2 * q(p) * a(p, r) for p in above if p >= n + (k - r + 1) // 2)
        s_r, _ = _parity_terms(k - r, 0)
        if s_r:
            p = n + (k - r) // 2
            val += q(p) * a(p, r)
    val -= sum(q(p) * a(p, k) for p in above)
    for r in range(-1, k + 1):
        val += (-1) ** (r + k) * sum(qt(p) * b(p, r) for p in above if p >= max(n + 1, n + (k - r + 1) // 2))
    return val


# --------------------------------------------------------------------------- majorants


@dataclass
class Majorants:
    pot: Potential

    def eta(self, n: int) -> float:
        s1 = sum(abs(v) for p, v in self.pot.support if p >= n)
        s2 = sum(abs(self.pot.q_tilde(p)) for p, _ in self.pot.support if p >= n)
        return max(s1, s2)

    def gamma(self, n: int) -> float:
        s1 = sum((p - n) * abs(v) for p, v in self.pot.support if p >= n)
        s2 = sum((p - n) * abs(self.pot.q_tilde(p)) for p, _ in self.pot.support if p >= n)
        return max(s1, s2)

    def coefficient_bound(self, n: int, k: int) -> float:
        """``2 exp(2 gamma(n)) eta(n + 1 + floor(k/2))``.

        Too tight: with a single site p, ``b^+_{p-1,2} = -(q_p + qt_p)`` while this
        bound is zero.  Kept for comparison with :meth:`safe_bound`.
        """
        return 2.0 * np.exp(2.0 * self.gamma(n)) * self.eta(n + 1 + k // 2)

    def safe_bound(self, n: int, k: int) -> float:
        """``4 exp(2 gamma(n)) eta(n + ceil(k/2))``; bounds both ``|a^+_{n,k}|`` and ``|b^+_{n,k}|``."""
        return 4.0 * np.exp(2.0 * self.gamma(n)) * self.eta(n + (k + 1) // 2)


def coefficient_majorants(pot: Potential) -> Majorants:
    return Majorants(pot)


# --------------------------------------------------------------------------- Wiener algebra


@dataclass
class WienerSeq:
    k: np.ndarray
    coefficients: np.ndarray
    norm: float
    tail_mass: float

    def coefficient(self, k: int):
        i = int(k - self.k[0])
        return self.coefficients[i] if 0 <= i < len(self.k) else 0.0


def wiener_norm(samples) -> WienerSeq:
    """Discrete Fourier coefficients on the half-offset grid and their l^1 sum.

    ``tail_mass`` is the share of the norm carried by ``|k| >= N/4``; a value
    that does not shrink with the grid flags a function outside the algebra.
    """
    samples = np.asarray(samples)
    n = samples.shape[-1]
    if n & (n - 1):
        raise ValueError("grid size must be a power of two")
    k, c = fourier_coefficients(samples)
    mag = np.abs(c)
    norm = float(mag.sum())
    tail = float(mag[np.abs(k) >= n // 4].sum() / norm) if norm > 0 else 0.0
    return WienerSeq(k, c, norm, tail)


# --------------------------------------------------------------------------- resonant factorization


@dataclass
class Factorization:
    theta: np.ndarray
    phi: np.ndarray
    divisor: str
    min_abs: float


def _mW(pot: Potential, z):
    """``(m + lambda) W`` on the positive band as a function of ``z``."""
    win = (pot.lo - 1, pot.lo)
    up, Vp = laurent_pair(pot, z, Side.PLUS, win)
    um, Vm = laurent_pair(pot, z, Side.MINUS, win)
    return up[0] * Vm[1] - um[0] * Vp[1]


def resonant_factorization(pot: Potential, edges, grid=None, safe_radius: float = 1e-4) -> Factorization:
    """``Phi = (m + lambda) W / d(z)`` with ``d = 1 - z``, ``1 + z`` or ``1 - z^2``.

    ``edges`` lists the resonant edges; each must be confirmed by
    :func:`detect_resonance`.  Near a removed zero the quotient is replaced
    by the ratio of derivatives.
    """
    edges = {Edge.coerce(e) for e in ([edges] if isinstance(edges, (str, Edge)) else edges)}
    if not edges:
        raise ValueError("no edge given")
    for e in edges:
        if not detect_resonance(pot, e).is_resonant:
            raise ValueError(f"edge {e.value} is not resonant")
    theta = theta_grid() if grid is None else np.asarray(grid, dtype=float)
    z = np.exp(1j * theta)
    if edges == {Edge.LOWER}:
        d, dd, name, roots = 1 - z, -np.ones_like(z), "1 - z", [1.0]
    elif edges == {Edge.UPPER}:
        d, dd, name, roots = 1 + z, np.ones_like(z), "1 + z", [-1.0]
    else:
        d, dd, name, roots = 1 - z * z, -2 * z, "1 - z^2", [1.0, -1.0]
    num = _mW(pot, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = num / d
    near = np.zeros(z.shape, dtype=bool)
    for r in roots:
        near |= np.abs(z - r) < safe_radius
    if np.any(near):
        h = 1e-6
        zn = z[near]
        dnum = (_mW(pot, zn * np.exp(1j * h)) - _mW(pot, zn * np.exp(-1j * h))) / (zn * (np.exp(1j * h) - np.exp(-1j * h)))
        phi[near] = dnum / dd[near]
    return Factorization(theta, phi, name, float(np.min(np.abs(phi))))


__all__ = [
    "Factorization", "Majorants", "SeriesCoeffs", "WienerSeq", "coefficient_majorants", "default_k_max",
    "direct_coefficients", "jost_h", "negative_band", "reconstruct_jost", "recursion_residual",
    "resonant_factorization", "series_coefficients", "wiener_norm",
]
