"""Dispersion geometry of the free lattice Dirac operator.

The continuous spectrum consists of two bands,
``(m, sqrt(4 + m^2))`` and its mirror image, parametrised by the
quasi-momentum ``theta`` through ``2 - 2 cos(theta) = lambda^2 - m^2``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

ROOT_TOL = 1e-12
DEGENERACY_TOL = 1e-9


class DomainError(ValueError):
    """Argument lies outside the domain where the map is defined."""


class Band(enum.IntEnum):
    POSITIVE = 1
    NEGATIVE = -1

    @classmethod
    def coerce(cls, band) -> "Band":
        if isinstance(band, Band):
            return band
        if band in ("+", "positive", "plus", 1, "1"):
            return cls.POSITIVE
        if band in ("-", "negative", "minus", -1, "-1"):
            return cls.NEGATIVE
        raise ValueError(f"unknown band {band!r}")


def check_mass(m: float) -> float:
    m = float(m)
    if not m > 0:
        raise DomainError(f"mass must be positive, got {m}")
    return m


def band_edges(band, m: float) -> tuple[float, float]:
    """Return the closed band as ``(low, high)``."""
    m = check_mass(m)
    top = np.sqrt(4.0 + m * m)
    if Band.coerce(band) is Band.POSITIVE:
        return m, top
    return -top, -m


def g(theta, m: float):
    """Positive dispersion branch ``sqrt(2 - 2 cos(theta) + m^2)``."""
    return np.sqrt(2.0 - 2.0 * np.cos(theta) + m * m)


def lambda_of_theta(theta, band, m: float):
    m = check_mass(m)
    return int(Band.coerce(band)) * g(theta, m)


def lambda_of_z(z, m: float, band=Band.POSITIVE):
    """Spectral parameter for ``z = exp(i theta)``; real for real ``z`` outside the gap image."""
    lam2 = m * m + 2.0 - z - 1.0 / z
    return int(Band.coerce(band)) * np.sqrt(lam2 + 0j if np.iscomplexobj(z) else lam2)


def theta_of_lambda(lam, m: float):
    """Inverse of :func:`lambda_of_theta` on ``[0, pi]``."""
    m = check_mass(m)
    lam = np.asarray(lam, dtype=float)
    a = np.abs(lam)
    top = np.sqrt(4.0 + m * m)
    slack = 1e-14 * top
    if np.any(a < m - slack) or np.any(a > top + slack):
        raise DomainError(f"lambda={lam} outside the closed bands for m={m}")
    c = np.clip(1.0 - (a * a - m * m) / 2.0, -1.0, 1.0)
    out = np.arccos(c)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PhaseParams:
    v: float
    kappa: float
    theta0: float

    @classmethod
    def for_mass(cls, m: float, v: float | None = None) -> "PhaseParams":
        k = kappa(m)
        return cls(v=np.sqrt(k) if v is None else float(v), kappa=k, theta0=float(np.arccos(k)))


def kappa(m: float) -> float:
    m = check_mass(m)
    return (2.0 + m * m - np.sqrt(4.0 * m * m + m**4)) / 2.0


def theta0(m: float) -> float:
    """Inflection point of ``g`` in ``(0, pi/2)``; ``g'(theta0) = sqrt(kappa)`` is the maximal group velocity."""
    return float(np.arccos(kappa(m)))


def phase_derivatives(theta, v: float, m: float, order: int):
    """``d^order/dtheta^order`` of ``Phi_v(theta) = g(theta) - v theta`` in closed form."""
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be 0..3, got {order}")
    m = check_mass(m)
    s, c = np.sin(theta), np.cos(theta)
    gg = g(theta, m)
    if order == 0:
        return gg - v * theta
    if order == 1:
        return s / gg - v
    if order == 2:
        return c / gg - s * s / gg**3
    return -s / gg - 3.0 * s * c / gg**3 + 3.0 * s**3 / gg**5


@dataclass(frozen=True)
class StationaryPoint:
    theta: float
    degenerate: bool


def _polish(f, df, a: float, b: float) -> float:
    """Bisection to ``ROOT_TOL`` with a final Newton step."""
    fa = f(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fa * fm <= 0:
            b = mid
        else:
            a, fa = mid, fm
        if b - a < ROOT_TOL:
            break
    x = 0.5 * (a + b)
    d = df(x)
    if d != 0:
        step = f(x) / d
        if abs(step) < ROOT_TOL:
            x -= step
    return x


def stationary_points(v: float, m: float) -> list[StationaryPoint]:
    """Real zeros of ``Phi_v'`` on ``[-pi, pi]``.

    ``g'`` is odd, increases on ``[0, theta0]`` and decreases on
    ``[theta0, pi]``, so each monotone piece holds at most one root.
    """
    if v < 0:
        raise ValueError("v must be non-negative")
    m = check_mass(m)
    t0 = theta0(m)
    vmax = float(phase_derivatives(t0, 0.0, m, 1))

    def d1(x):
        return float(phase_derivatives(x, v, m, 1))

    def d2(x):
        return float(phase_derivatives(x, v, m, 2))

    if v == 0:
        pts = [0.0, -np.pi, np.pi]
        return [StationaryPoint(p, abs(d2(p)) < DEGENERACY_TOL) for p in pts]
    if abs(v - vmax) <= ROOT_TOL:
        return [StationaryPoint(t0, True)]
    if v > vmax:
        return []
    roots = [_polish(d1, d2, 0.0, t0), _polish(d1, d2, t0, np.pi)]
    return [StationaryPoint(r, abs(d2(r)) < DEGENERACY_TOL) for r in roots]


def max_group_velocity(m: float) -> float:
    return float(np.sqrt(kappa(m)))
