"""Uniform quasi-momentum grids and discrete Fourier coefficients on them."""
from __future__ import annotations

import numpy as np

DEFAULT_LOG2 = 12


def theta_grid(log2: int = DEFAULT_LOG2) -> np.ndarray:
    """``2**log2`` points on ``(-pi, pi)`` offset by half a step, so 0 and pi are never nodes."""
    n = 2**log2
    h = 2.0 * np.pi / n
    return -np.pi + (np.arange(n) + 0.5) * h


def fourier_coefficients(samples: np.ndarray, axis: int = -1):
    """``c_k = mean_j f(theta_j) exp(-i k theta_j)`` for ``k = -N/2 .. N/2 - 1``.

    ``samples`` must live on :func:`theta_grid`. Returns ``(k, c)`` with ``c``
    ordered like ``k`` along ``axis``.
    """
    samples = np.asarray(samples)
    n = samples.shape[axis]
    h = 2.0 * np.pi / n
    ft = np.fft.fft(samples, axis=axis) / n
    k = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    phase = np.exp(1j * k * np.pi) * np.exp(-0.5j * k * h)
    shape = [1] * samples.ndim
    shape[axis] = n
    ft = ft * phase.reshape(shape)
    order = np.argsort(k)
    return k[order], np.take(ft, order, axis=axis)


def coefficient(k_arr: np.ndarray, c: np.ndarray, k: int):
    """Pick coefficient ``k`` from the output of :func:`fourier_coefficients` (zero if out of range)."""
    i = int(k - k_arr[0])
    if 0 <= i < len(k_arr):
        return c[..., i]
    return np.zeros(c.shape[:-1], dtype=c.dtype)
