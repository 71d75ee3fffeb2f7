"""Minimal dense Laurent polynomials with real or complex coefficients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Laurent:
    """``sum_i c[i] z^(lo + i)``."""

    lo: int
    c: np.ndarray

    @classmethod
    def zero(cls) -> "Laurent":
        return cls(0, np.zeros(0))

    @classmethod
    def monomial(cls, k: int, coef=1.0) -> "Laurent":
        return cls(k, np.array([coef], dtype=float))

    @classmethod
    def from_dict(cls, d: dict) -> "Laurent":
        if not d:
            return cls.zero()
        lo, hi = min(d), max(d)
        c = np.zeros(hi - lo + 1, dtype=np.result_type(*d.values(), float))
        for k, v in d.items():
            c[k - lo] += v
        return cls(lo, c)

    @property
    def hi(self) -> int:
        return self.lo + len(self.c) - 1

    def __add__(self, other: "Laurent") -> "Laurent":
        if not len(self.c):
            return other
        if not len(other.c):
            return self
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        out = np.zeros(hi - lo + 1, dtype=np.result_type(self.c, other.c))
        out[self.lo - lo:self.lo - lo + len(self.c)] += self.c
        out[other.lo - lo:other.lo - lo + len(other.c)] += other.c
        return Laurent(lo, out)

    def __neg__(self) -> "Laurent":
        return Laurent(self.lo, -self.c)

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other) -> "Laurent":
        if isinstance(other, Laurent):
            if not len(self.c) or not len(other.c):
                return Laurent.zero()
            return Laurent(self.lo + other.lo, np.convolve(self.c, other.c))
        return Laurent(self.lo, self.c * other)

    __rmul__ = __mul__

    def shift(self, s: int) -> "Laurent":
        """Multiply by ``z^s``."""
        return Laurent(self.lo + s, self.c)

    def coef(self, k: int):
        i = k - self.lo
        return self.c[i] if 0 <= i < len(self.c) else 0.0

    def coefs(self, k_lo: int, k_hi: int) -> np.ndarray:
        return np.array([self.coef(k) for k in range(k_lo, k_hi + 1)], dtype=np.result_type(self.c, float))

    def reflect(self) -> "Laurent":
        """``p(1/z)``."""
        return Laurent(-self.hi, self.c[::-1])

    def __call__(self, z):
        z = np.asarray(z)
        out = np.zeros(z.shape, dtype=np.result_type(self.c, z, float))
        for i, ci in enumerate(self.c):
            out = out + ci * z ** (self.lo + i)
        return out

    def sup(self) -> float:
        return float(np.max(np.abs(self.c))) if len(self.c) else 0.0

    def divide_by_z_minus_1(self) -> "Laurent":
        """Exact quotient by ``z - 1``; requires ``p(1) = 0`` (checked to rounding)."""
        if not len(self.c):
            return self
        c = self.c
        # synthetic division from the top degree down
        q = np.zeros(len(c) - 1, dtype=c.dtype)
        acc = 0.0
        for i in range(len(c) - 1, 0, -1):
            acc = acc + c[i]
            q[i - 1] = acc
        rem = acc + c[0]
        scale = max(float(np.max(np.abs(c))), 1.0)
        if abs(rem) > 1e-10 * scale:
            raise ValueError(f"polynomial does not vanish at z=1 (remainder {rem:.3e})")
        return Laurent(self.lo, q)


Z = Laurent.monomial(1)
ONE = Laurent.monomial(0)
ZINV = Laurent.monomial(-1)
# lambda^2 - m^2 as a Laurent polynomial in z
LAM2 = Laurent(-1, np.array([-1.0, 2.0, -1.0]))
