"""Propagator ``exp(-itD) P_c``: spectral integral, exact diagonalisation, weighted norms, decay fits.

Stone's formula with ``lambda = +-g(theta)`` turns the continuous part into
a periodic integral over the quasi-momentum::

    [exp(-itD) P_c]_{x,y} = sum_bands (1/2 pi i) int_{-pi}^{pi} exp(-it lambda) (sin theta / lambda) G_theta(x, y) dtheta

where ``G_theta`` is the boundary value of the resolvent kernel
``-psi^-(left) psi^+(right) / W`` (left/right along the chain order).  The
integrand is analytic and periodic, so the trapezoid rule on the
half-offset grid converges geometrically once the grid resolves the
oscillation ``exp(-it g)`` and the plane waves ``z^{+-n}``.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from ._grid import fourier_coefficients, theta_grid
from .jost import Side, jost_solution, wronskian
from .potential import Potential, chain_position, truncated_matrix
from .spectral_map import Band, band_edges, kappa, lambda_of_theta, max_group_velocity

CLASS_TOL = 1e-9


class TruncationWarning(UserWarning):
    """Wavefront reflected from the truncation boundary may have reached the window."""


class NormKind(str, enum.Enum):
    L1_TO_LINF = "l1_to_linf"
    L2SIG = "l2sig_to_l2msig"
    L11_TO_LINF_M1 = "l11_to_linf_m1"

    @classmethod
    def coerce(cls, kind) -> "NormKind":
        if isinstance(kind, NormKind):
            return kind
        for k in cls:
            if kind == k.value or kind == k.name.lower():
                return k
        if kind in ("l2sig", "l2_sigma"):
            return cls.L2SIG
        raise ValueError(f"unknown norm kind {kind!r}")


# --------------------------------------------------------------------------- kernels


@dataclass
class PropagatorKernel:
    """Blocks ``[K]_{(n,a),(k,b)}`` on sites ``n_lo..n_hi``; matrix index ``2(n - n_lo) + a``."""

    t: float
    n_lo: int
    n_hi: int
    matrix: np.ndarray
    route: str = ""
    trusted: bool = True

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_lo, self.n_hi + 1)

    def block(self, n: int, k: int) -> np.ndarray:
        i, j = 2 * (n - self.n_lo), 2 * (k - self.n_lo)
        return self.matrix[i:i + 2, j:j + 2]


def t_max(N: int, m: float) -> float:
    """Latest time before the fastest wave reflected at ``+-N`` can return to the centre half."""
    return N / (2.0 * max_group_velocity(m))


def default_n_theta(t: float, span: int, m: float, minimum: int = 1024) -> int:
    """Power of two resolving ``exp(-it g)`` and plane waves over ``span`` sites."""
    need = max(1.3 * (abs(t) * max_group_velocity(m) + span) + 256, 2 * span + 64)
    n = minimum
    while n < need:
        n *= 2
    return n


def _band_weights(pot: Potential, theta: np.ndarray, band: Band, t: float, window):
    """Jost fields on ``window`` and the quadrature weight of the Green factor at each node."""
    # one extra site so the Wronskian is available on single-site windows
    window = (window[0], window[1] + 1)
    wp = jost_solution(pot, theta, Side.PLUS, band, window)
    wm = jost_solution(pot, theta, Side.MINUS, band, window)
    W = wronskian(wp, wm, window[0])
    lam = wp.lam
    # trapezoid: (1/2 pi i) * (2 pi / N) = 1/(i N); Green factor carries -1/W
    wt = -np.exp(-1j * t * lam) * np.sin(theta) / lam / W / (1j * len(theta))
    return wp, wm, wt


def _chain_fields(w, S: int) -> np.ndarray:
    """Fields on the first ``S`` sites ordered by matrix index ``2(n - n_lo) + c``: shape ``(2S, Ntheta)``."""
    out = np.empty((2 * S,) + w.u.shape[1:], dtype=complex)
    out[0::2] = w.u[:S]
    out[1::2] = w.v[:S]
    return out


def spectral_kernel(pot: Potential, t: float, window: tuple[int, int], n_theta: int | None = None) -> PropagatorKernel:
    """``exp(-itD) P_c`` on a site window by the quasi-momentum integral (both bands)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    n_lo, n_hi = window
    span = max(n_hi - n_lo, pot.hi - n_lo, n_hi - pot.lo) + 2
    n_theta = n_theta or default_n_theta(t, span, pot.m)
    theta = theta_grid(int(np.log2(n_theta)))
    S = n_hi - n_lo + 1
    sites = np.repeat(np.arange(n_lo, n_hi + 1), 2)
    comps = np.tile([0, 1], S)
    pos = chain_position(sites, comps)
    upper = pos[:, None] <= pos[None, :]
    K = np.zeros((2 * S, 2 * S), dtype=complex)
    for band in (Band.POSITIVE, Band.NEGATIVE):
        wp, wm, wt = _band_weights(pot, theta, band, t, window)
        Pm = _chain_fields(wm, S)
        Pp = _chain_fields(wp, S)
        # M[x, y] = sum_theta wt psi^-_x psi^+_y ; entry uses it when x is left of y
        M = (Pm * wt) @ Pp.T
        K += np.where(upper, M, M.T)
    return PropagatorKernel(float(t), n_lo, n_hi, K, route="spectral")


def propagator_spectral(pot: Potential, t: float, n: int, k: int, n_theta: int | None = None) -> np.ndarray:
    """2x2 block ``[exp(-itD) P_c]_{n,k}``; blocks with ``n > k`` follow from symmetry."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if n > k:
        return propagator_spectral(pot, t, k, n, n_theta).T
    if k - n < 64:
        return spectral_kernel(pot, t, (n, k), n_theta).block(n, k).copy()
    return _far_block(pot, t, n, k, n_theta)


def _far_block(pot: Potential, t: float, n: int, k: int, n_theta: int | None) -> np.ndarray:
    """Block for distant sites without forming the full window."""
    lo = min(n, pot.lo) - 1
    hi = max(k, pot.hi) + 1
    n_theta = n_theta or default_n_theta(t, hi - lo, pot.m)
    theta = theta_grid(int(np.log2(n_theta)))
    out = np.zeros((2, 2), dtype=complex)
    for band in (Band.POSITIVE, Band.NEGATIVE):
        wp, wm, wt = _band_weights(pot, theta, band, t, (lo, hi))
        for a in (0, 1):
            for b in (0, 1):
                left = (wm.u if a == 0 else wm.v)[n - lo]
                right = (wp.u if b == 0 else wp.v)[k - lo]
                out[a, b] += np.sum(wt * left * right)
    return out


# --------------------------------------------------------------------------- exact route


@dataclass
class TruncatedOperator:
    pot: Potential
    N: int
    matrix: np.ndarray
    evals: np.ndarray
    evecs: np.ndarray
    in_band: np.ndarray

    @classmethod
    def build(cls, pot: Potential, N: int, edge_buffer: float = 0.0) -> "TruncatedOperator":
        """Diagonalise D on ``-N..N``; eigenvalues in the closed bands (shrunk by ``edge_buffer``) span ``P_c``."""
        D = truncated_matrix(pot, N)
        evals, evecs = scipy.linalg.eigh(D)
        lo, hi = band_edges(Band.POSITIVE, pot.m)
        a = np.abs(evals)
        in_band = (a >= lo - CLASS_TOL + edge_buffer) & (a <= hi + CLASS_TOL - edge_buffer)
        return cls(pot, N, D, evals, evecs, in_band)

    def index(self, n: int, comp: int) -> int:
        return 2 * (n + self.N) + comp

    def kernel(self, t: float, window: tuple[int, int]) -> PropagatorKernel:
        n_lo, n_hi = window
        if n_lo < -self.N or n_hi > self.N:
            raise ValueError("window outside the truncated lattice")
        sl = slice(self.index(n_lo, 0), self.index(n_hi, 1) + 1)
        V = self.evecs[sl][:, self.in_band]
        phase = np.exp(-1j * t * self.evals[self.in_band])
        K = (V * phase) @ V.T
        trusted = t <= t_max(self.N, self.pot.m) and max(abs(n_lo), abs(n_hi)) <= self.N // 2
        return PropagatorKernel(float(t), n_lo, n_hi, K, route="exact", trusted=trusted)

    def projector(self, window: tuple[int, int]) -> np.ndarray:
        return self.kernel(0.0, window).matrix


def propagator_exact(pot: Potential, N: int, t: float, window: tuple[int, int],
                     op: TruncatedOperator | None = None) -> PropagatorKernel:
    """Spectral-theorem kernel of the truncated operator restricted to ``window``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    op = op or TruncatedOperator.build(pot, N)
    ker = op.kernel(t, window)
    if not ker.trusted:
        warnings.warn(f"t={t} or window {window} beyond the reflection-free range of N={op.N}", TruncationWarning)
    return ker


# --------------------------------------------------------------------------- free kernel by FFT


def _free_band_samples(m: float, theta: np.ndarray, band: Band, t: float):
    lam = lambda_of_theta(theta, band, m)
    z = np.exp(1j * theta)
    if band is Band.POSITIVE:
        cp = (np.ones_like(z), (1.0 / z - 1.0) / (m + lam))
        cm = (np.ones_like(z), (z - 1.0) / (m + lam))
        W = 2j * np.sin(theta) / (m + lam)
    else:
        cp = ((z - 1.0) / (lam - m), np.ones_like(z))
        cm = ((1.0 / z - 1.0) / (lam - m), np.ones_like(z))
        W = (z - 1.0 / z) / (lam - m)
    f = -np.exp(-1j * t * lam) * np.sin(theta) / lam / W / (2j * np.pi)
    return cp, cm, f


def free_kernel_by_distance(m: float, t: float, d_max: int, n_theta: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Free kernel entries ``K[d, a, b] = [exp(-itD_0)]_{(n,a),(n+d,b)}`` for ``|d| <= d_max``."""
    n_theta = n_theta or default_n_theta(t, d_max, m)
    theta = theta_grid(int(np.log2(n_theta)))
    ds = np.arange(-d_max, d_max + 1)
    out = np.zeros((len(ds), 2, 2), dtype=complex)
    left_first = chain_position(0, np.arange(2))[:, None, None] <= chain_position(ds, np.arange(2)[:, None])[None]
    for band in (Band.POSITIVE, Band.NEGATIVE):
        cp, cm, f = _free_band_samples(m, theta, band, t)
        for a in (0, 1):
            for b in (0, 1):
                # (n, a) on the left: cm_a cp_b z^d; otherwise cm_b cp_a z^-d
                k, c1 = fourier_coefficients(f * cm[a] * cp[b])
                k, c2 = fourier_coefficients(f * cm[b] * cp[a])
                fwd = 2 * np.pi * c1[-ds - k[0]]
                bwd = 2 * np.pi * c2[ds - k[0]]
                out[:, a, b] += np.where(left_first[a, b], fwd, bwd)
    return ds, out


# --------------------------------------------------------------------------- weighted norms


def weights(sites: np.ndarray, sigma: float) -> np.ndarray:
    return (1.0 + np.abs(sites)) ** (-sigma)


def weighted_norm(kernel: PropagatorKernel, kind, sigma: float | None = None) -> float:
    """Norm of the kernel restricted to its window.

    ``l1_to_linf``: largest entry; ``l2sig_to_l2msig``: largest singular value
    of ``rho K rho`` with ``rho = (1+|n|)^{-sigma}``; ``l11_to_linf_m1``:
    largest entry of ``(1+|n|)^{-1} K (1+|k|)^{-1}``.
    """
    kind = NormKind.coerce(kind)
    K = kernel.matrix
    if kind is NormKind.L1_TO_LINF:
        return float(np.max(np.abs(K)))
    sites = np.repeat(kernel.sites, 2)
    if kind is NormKind.L11_TO_LINF_M1:
        w = weights(sites, 1.0)
        return float(np.max(np.abs(w[:, None] * K * w[None, :])))
    if sigma is None:
        raise ValueError("sigma required for the l2 weighted norm")
    w = weights(sites, sigma)
    return float(np.linalg.norm(w[:, None] * K * w[None, :], 2))


def free_l1_to_linf(m: float, t: float, d_max: int | None = None) -> tuple[float, int]:
    """Largest free-kernel entry over all distances; returns ``(value, argmax distance)``."""
    d_max = d_max if d_max is not None else int(1.3 * max_group_velocity(m) * t) + 50
    ds, K = free_kernel_by_distance(m, t, d_max)
    mag = np.abs(K).reshape(len(ds), -1).max(axis=1)
    i = int(np.argmax(mag))
    return float(mag[i]), int(ds[i])


def free_l2sig(m: float, t: float, sigma: float, L: int, tol: float = 1e-10) -> float:
    """``||rho K rho||`` on sites ``-L..L`` for the free kernel, Toeplitz matvec by FFT."""
    ds, Kd = free_kernel_by_distance(m, t, 2 * L)
    S = 2 * L + 1
    rho = weights(np.arange(-L, L + 1), sigma)
    nfft = 1
    while nfft < 6 * L + 2:
        nfft *= 2
    # y_a[n] = sum_k K_ab[k - n] x_b[k] is a convolution with the reversed distance profile
    ft = {(a, b): np.fft.fft(Kd[::-1, a, b], nfft) for a in (0, 1) for b in (0, 1)}

    def apply(x_flat):
        x = x_flat.reshape(S, 2) * rho[:, None]
        xf = [np.fft.fft(x[:, b], nfft) for b in (0, 1)]
        y = np.empty((S, 2), dtype=complex)
        for a in (0, 1):
            full = np.fft.ifft(ft[a, 0] * xf[0] + ft[a, 1] * xf[1])
            y[:, a] = full[2 * L:2 * L + S]
        return (y * rho[:, None]).reshape(-1)

    # K is complex symmetric, so K^H x = conj(K conj x); fixed start vector keeps output deterministic
    op = scipy.sparse.linalg.LinearOperator(
        (2 * S, 2 * S), matvec=apply, rmatvec=lambda x: np.conj(apply(np.conj(x))), dtype=complex)
    v0 = np.ones(2 * S, dtype=complex)
    s = scipy.sparse.linalg.svds(op, k=1, return_singular_vectors=False, tol=tol, v0=v0)
    return float(s[0])


@dataclass
class FarField:
    """Kernel rows of a near window extended to distant sites by plane waves.

    ``right[x, b, j]`` is ``K[x, (hi + 1 + j, b)]`` and ``left[x, b, j]`` is
    ``K[x, (lo - reach + j, b)]`` for chain rows ``x`` of the near window;
    ``both[a, b, d]`` is ``K[(n, a), (k, b)]`` for ``n < lo``, ``k > hi`` with
    ``(k - hi) + (lo - n) = d``, independent of how ``d`` is split.
    """

    near: PropagatorKernel
    lo: int
    hi: int
    reach: int
    right: np.ndarray
    left: np.ndarray
    both: np.ndarray

    def block(self, n: int, k: int) -> np.ndarray:
        lo, hi = self.lo, self.hi
        if n > k:
            return self.block(k, n).T
        if lo <= n and k <= hi:
            return self.near.block(n, k)
        if lo <= n <= hi:
            return self.right[2 * (n - lo):2 * (n - lo) + 2, :, k - hi - 1]
        if lo <= k <= hi:
            return self.left[2 * (k - lo):2 * (k - lo) + 2, :, n - lo + self.reach].T
        if k < lo or n > hi:
            raise ValueError("both sites on the same side of the window")
        return self.both[:, :, (k - hi) + (lo - n)]


def far_field(pot: Potential, t: float, window: tuple[int, int], reach: int) -> FarField:
    """Near kernel on ``window`` (widened to cover the support) plus its plane-wave extension."""
    m = pot.m
    lo = min(window[0], pot.lo) - 1
    hi = max(window[1], pot.hi) + 1
    n_theta = default_n_theta(t, 2 * reach + hi - lo, m)
    theta = theta_grid(int(np.log2(n_theta)))
    z = np.exp(1j * theta)
    N = len(theta)
    near = spectral_kernel(pot, t, (lo, hi), n_theta)
    S = hi - lo + 1
    far_r = np.arange(hi + 1, hi + 1 + reach)
    far_l = np.arange(lo - reach, lo)
    ds = np.arange(0, 2 * reach + 2)
    right = np.zeros((2 * S, 2, reach), dtype=complex)
    left = np.zeros((2 * S, 2, reach), dtype=complex)
    both = np.zeros((2, 2, len(ds)), dtype=complex)
    for band in (Band.POSITIVE, Band.NEGATIVE):
        wp, wm, wt = _band_weights(pot, theta, band, t, (lo, hi))
        Pm, Pp = _chain_fields(wm, S), _chain_fields(wp, S)
        # beyond the window psi^+_k = cp z^k and psi^-_n = cm z^-n
        cp = (wp.u[S - 1] * z ** (-hi), wp.v[S - 1] * z ** (-hi))
        cm = (wm.u[0] * z ** lo, wm.v[0] * z ** lo)
        for b in (0, 1):
            kk, c = fourier_coefficients(wt * Pm * cp[b] * N, axis=-1)
            right[:, b] += c[:, -far_r - kk[0]]
            kk, c = fourier_coefficients(wt * Pp * cm[b] * N, axis=-1)
            left[:, b] += c[:, far_l - kk[0]]
            for a in (0, 1):
                # z^(k - n) with k - n = d + hi - lo
                kk, c = fourier_coefficients(wt * cm[a] * cp[b] * N)
                both[a, b] += c[-(ds + hi - lo) - kk[0]]
    return FarField(near, lo, hi, reach, right, left, both)


def perturbed_l11_linf_m1(pot: Potential, t: float, n_range: int = 12, k_reach: int | None = None) -> tuple[float, tuple]:
    """``sup (1+|n|)^{-1} |K_{nk}| (1+|k|)^{-1}`` with n near the support and k over the whole light cone.

    Far sites come from :func:`far_field`; the symmetric half (n far, k
    near) carries the same weights.
    """
    k_reach = k_reach if k_reach is not None else int(1.3 * max_group_velocity(pot.m) * t) + 50
    ff = far_field(pot, t, (-n_range, n_range), k_reach)
    near = ff.near
    rho = weights(np.repeat(near.sites, 2), 1.0)
    Wn = np.abs(rho[:, None] * near.matrix * rho[None, :])
    i, j = np.unravel_index(np.argmax(Wn), Wn.shape)
    best, arg = float(Wn[i, j]), (int(near.sites[i // 2]), int(near.sites[j // 2]))
    far_r = np.arange(ff.hi + 1, ff.hi + 1 + k_reach)
    far_l = np.arange(ff.lo - k_reach, ff.lo)
    for acc, ks in ((ff.right, far_r), (ff.left, far_l)):
        vals = np.abs(acc) * rho[:, None, None] / (1.0 + np.abs(ks))[None, None, :]
        i, b, j = np.unravel_index(np.argmax(vals), vals.shape)
        if vals[i, b, j] > best:
            best, arg = float(vals[i, b, j]), (int(near.sites[i // 2]), int(ks[j]))
    return best, arg


def perturbed_l2sig(pot: Potential, t: float, sigma: float, L: int) -> float:
    """``||rho K rho||`` on ``-L..L`` from the dense spectral kernel."""
    ker = spectral_kernel(pot, t, (-L, L))
    return weighted_norm(ker, NormKind.L2SIG, sigma)


# --------------------------------------------------------------------------- scans and fits


@dataclass
class ScanResult:
    t: float
    v: np.ndarray
    sup_block: np.ndarray

    @property
    def argmax_v(self) -> float:
        return float(self.v[int(np.argmax(self.sup_block))])


def kernel_scan(pot: Potential, t: float, v_grid) -> ScanResult:
    """Largest block entry at separation ``k - n = round(v t)`` along three rays.

    Rays: ``n <= k <= 0``, ``n <= 0 <= k`` and ``0 <= n <= k``, so every
    position of the pair relative to the support is sampled.
    """
    v_grid = np.asarray(v_grid, dtype=float)
    d_all = np.unique(np.rint(v_grid * t).astype(int))
    if pot.is_free:
        ds, K = free_kernel_by_distance(pot.m, t, int(d_all.max()) + 1)
        mag = np.abs(K).reshape(len(ds), -1).max(axis=1)
        lookup = dict(zip(ds.tolist(), mag))
        sup = np.array([lookup[int(round(v * t))] for v in v_grid])
        return ScanResult(t, v_grid, sup)
    ff = far_field(pot, t, (0, 0), int(d_all.max()) + 1)
    vals = {}
    for d in d_all:
        d = int(d)
        pairs = [(-d, 0), (-(d // 2), d - d // 2), (0, d)]
        vals[d] = max(float(np.max(np.abs(ff.block(n, k)))) for n, k in pairs)
    sup = np.array([vals[int(round(v * t))] for v in v_grid])
    return ScanResult(t, v_grid, sup)


def block_series(pot: Potential, n: int, k: int, t_grid) -> np.ndarray:
    """Largest entry of the block ``(n, k)`` at each time."""
    t_grid = np.asarray(t_grid, dtype=float)
    if pot.is_free:
        d = abs(k - n)
        return np.array([np.abs(free_kernel_by_distance(pot.m, t, d)[1][2 * d]).max() for t in t_grid])
    return np.array([np.abs(propagator_spectral(pot, t, n, k)).max() for t in t_grid])


def reflect_kernel(kernel: PropagatorKernel) -> PropagatorKernel:
    """Kernel of the mirrored potential ``q'_n = q_{-n}`` at the same time.

    Chain reversal ``p -> 1 - p`` with signs ``(-1)^p`` maps D(q) to -D(q'),
    so ``K'_{(n,a),(k,b)} = (-1)^(a+b) conj K_{(-n,1-a),(-k,1-b)}``.
    """
    S = kernel.n_hi - kernel.n_lo + 1
    idx = np.arange(2 * S)
    new_sites = -kernel.n_hi + idx // 2
    comps = idx % 2
    partner = 2 * (-new_sites - kernel.n_lo) + (1 - comps)
    sign = (-1.0) ** comps
    K = sign[:, None] * np.conj(kernel.matrix[np.ix_(partner, partner)]) * sign[None, :]
    return PropagatorKernel(kernel.t, -kernel.n_hi, -kernel.n_lo, K, kernel.route, kernel.trusted)


@dataclass
class DecayFit:
    norm_kind: str
    sigma: float | None
    t: np.ndarray
    norm: np.ndarray
    exponent: float
    ci: float
    envelope: bool = False
    route: str = "spectral"
    fit_t: np.ndarray = field(default_factory=lambda: np.zeros(0))
    fit_norm: np.ndarray = field(default_factory=lambda: np.zeros(0))


def envelope_maxima(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of interior local maxima; endpoints are skipped since a falling edge is not a peak."""
    idx = [i for i in range(1, len(y) - 1) if y[i] >= y[i - 1] and y[i] >= y[i + 1]]
    return np.array(idx, dtype=int)


def loglog_fit(t, y) -> tuple[float, float]:
    """Least-squares slope of ``log y`` against ``log t`` with its standard error."""
    x = np.log(np.asarray(t, dtype=float))
    w = np.log(np.asarray(y, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, w, rcond=None)
    dof = max(len(x) - 2, 1)
    resid = w - A @ coef
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    return float(coef[0]), float(np.sqrt(cov[0, 0]))


def fit_decay(t, y, kind: str, sigma=None, route="spectral", oscillation_tol: float = 0.10) -> DecayFit:
    """Plain fit, switching to envelope maxima when residual oscillation exceeds ``oscillation_tol``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, se = loglog_fit(t, y)
    pred = np.exp(np.polyval(np.polyfit(np.log(t), np.log(y), 1), np.log(t)))
    wobble = float(np.max(np.abs(y / pred - 1.0)))
    if wobble > oscillation_tol:
        idx = envelope_maxima(t, y)
        if len(idx) >= 3:
            s2, e2 = loglog_fit(t[idx], y[idx])
            return DecayFit(kind, sigma, t, y, s2, e2, True, route, t[idx], y[idx])
    return DecayFit(kind, sigma, t, y, slope, se, False, route, t, y)


def geometric_grid(t_min: float, t_max_: float, points: int) -> np.ndarray:
    if points < 2:
        raise ValueError("need at least two points")
    return np.geomspace(t_min, t_max_, points)


def norm_at(pot: Potential, kind, t: float, sigma: float | None = None, route: str = "spectral",
            op: TruncatedOperator | None = None, L: int | None = None) -> float:
    """One sample of the requested norm, choosing the fast path when one applies."""
    kind = NormKind.coerce(kind)
    if route == "exact":
        if op is None:
            raise ValueError("exact route needs a TruncatedOperator")
        half = L if L is not None else op.N // 2
        ker = propagator_exact(pot, op.N, t, (-half, half), op)
        return weighted_norm(ker, kind, sigma)
    if kind is NormKind.L1_TO_LINF:
        if pot.is_free:
            return free_l1_to_linf(pot.m, t)[0]
        half = L if L is not None else int(1.3 * max_group_velocity(pot.m) * t) + 20
        return weighted_norm(spectral_kernel(pot, t, (-half, half)), kind)
    if kind is NormKind.L11_TO_LINF_M1:
        return perturbed_l11_linf_m1(pot, t)[0]
    if sigma is None:
        raise ValueError("sigma required")
    if pot.is_free:
        half = L if L is not None else int(0.8 * t) + 40
        return free_l2sig(pot.m, t, sigma, half)
    half = L if L is not None else 160
    return perturbed_l2sig(pot, t, sigma, half)


def decay_fit(pot: Potential, norm_kind, t_grid, route: str = "spectral", sigma: float | None = None,
              N: int | None = None, L: int | None = None, op: TruncatedOperator | None = None) -> DecayFit:
    """Sample the norm on ``t_grid`` and fit the log-log slope."""
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 8:
        raise ValueError("t_grid needs at least 8 points")
    if route == "exact":
        N = op.N if op is not None else (N or 1600)
        if t_grid.max() > t_max(N, pot.m):
            warnings.warn(f"t up to {t_grid.max()} exceeds t_max={t_max(N, pot.m):.1f} for N={N}", TruncationWarning)
        op = op or TruncatedOperator.build(pot, N)
    kind = NormKind.coerce(norm_kind)
    y = np.array([norm_at(pot, kind, t, sigma, route, op, L) for t in t_grid])
    return fit_decay(t_grid, y, kind.value, sigma, route)


def wavefront_velocity(m: float) -> float:
    return float(np.sqrt(kappa(m)))


__all__ = [
    "DecayFit", "FarField", "NormKind", "far_field", "block_series", "reflect_kernel", "PropagatorKernel", "ScanResult", "TruncatedOperator", "TruncationWarning",
    "decay_fit", "default_n_theta", "envelope_maxima", "fit_decay", "free_kernel_by_distance", "free_l1_to_linf",
    "free_l2sig", "geometric_grid", "kernel_scan", "loglog_fit", "norm_at", "perturbed_l11_linf_m1",
    "perturbed_l2sig", "propagator_exact", "propagator_spectral", "spectral_kernel", "t_max",
    "wavefront_velocity", "weighted_norm", "weights",
]
