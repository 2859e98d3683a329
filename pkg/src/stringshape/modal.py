"""Chebyshev modal curvature basis: evaluation and exact arc-length integrals.

The curvature field is u(s) = Phi(s) @ c with Phi block-diagonal over the
x/y/z bending-and-torsion axes.  Polynomials of the first kind are evaluated
on the shifted coordinate x(s) = (2s - L)/L by the three-term recursion, which
is exact at the interval endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _shift(s, length):
    s = np.asarray(s, dtype=float)
    if np.any(s < -1e-12) or np.any(s > length + 1e-12):
        raise ValueError(f"arc length outside [0, {length}]")
    return np.clip(2.0 * s / length - 1.0, -1.0, 1.0)


def _cheb_all(x, n_max):
    """Values of T_0..T_n_max at x (x may be an array); shape (..., n_max+1)."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (n_max + 1,))
    out[..., 0] = 1.0
    if n_max >= 1:
        out[..., 1] = x
    for n in range(2, n_max + 1):
        out[..., n] = 2.0 * x * out[..., n - 1] - out[..., n - 2]
    return out


def chebyshev(n, s, length):
    """Shifted Chebyshev polynomial T_n(s) on [0, length]."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    x = _shift(s, length)
    return _cheb_all(x, n)[..., n]


def _cheb_antideriv(x, n_max):
    """Antiderivatives F_n(x) of T_n on [-1, 1] with F_n(-1) = 0, up to n_max.

    Uses int T_n dx = (T_{n+1}/(n+1) - T_{n-1}/(n-1))/2 for n >= 2, together
    with int T_0 = T_1 and int T_1 = (T_2 + T_0)/4.
    """
    t = _cheb_all(x, n_max + 1)
    tm1 = _cheb_all(np.asarray(-1.0), n_max + 1)
    out = np.empty(np.shape(x) + (n_max + 1,))

    def f(vals, n):
        if n == 0:
            return vals[..., 1]
        if n == 1:
            return (vals[..., 2] + vals[..., 0]) / 4.0
        return 0.5 * (vals[..., n + 1] / (n + 1) - vals[..., n - 1] / (n - 1))

    for n in range(n_max + 1):
        out[..., n] = f(t, n) - f(tm1, n)
    return out


@dataclass(frozen=True)
class ModalBasis:
    """Per-axis Chebyshev degree lists; empty lists drop an axis (e.g. torsion)."""

    x: tuple = ()
    y: tuple = ()
    z: tuple = ()
    length: float = 1.0

    def __post_init__(self):
        for axis in (self.x, self.y, self.z):
            degs = list(axis)
            if degs != sorted(degs) or len(set(degs)) != len(degs) or any(d < 0 for d in degs):
                raise ValueError("axis degrees must be strictly increasing and >= 0")
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(self.y))
        object.__setattr__(self, "z", tuple(self.z))
        if self.m < 1:
            raise ValueError("basis needs at least one column")
        if self.length <= 0:
            raise ValueError("length must be positive")

    @property
    def m(self):
        return len(self.x) + len(self.y) + len(self.z)

    @property
    def has_torsion(self):
        return len(self.z) > 0

    def matrix(self, s):
        """Phi(s): shape (3, m) for scalar s, (n, 3, m) for an array of s."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        x = _shift(s_arr, self.length)
        n_max = max([0, *self.x, *self.y, *self.z])
        t = _cheb_all(x, n_max)
        out = np.zeros((len(s_arr), 3, self.m))
        col = 0
        for row, degs in enumerate((self.x, self.y, self.z)):
            for d in degs:
                out[:, row, col] = t[..., d]
                col += 1
        return out[0] if np.isscalar(s) or np.ndim(s) == 0 else out

    def integral(self, s_from, s_to):
        """Exact entrywise integral of Phi over [s_from, s_to], shape (3, m)."""
        if not (0.0 <= s_from <= s_to <= self.length + 1e-12):
            raise ValueError("need 0 <= s_from <= s_to <= length")
        n_max = max([0, *self.x, *self.y, *self.z])
        scale = self.length / 2.0  # ds/dx
        lo = _cheb_antideriv(_shift(s_from, self.length), n_max)
        hi = _cheb_antideriv(_shift(s_to, self.length), n_max)
        out = np.zeros((3, self.m))
        col = 0
        for row, degs in enumerate((self.x, self.y, self.z)):
            for d in degs:
                out[row, col] = scale * (hi[..., d] - lo[..., d])
                col += 1
        return out

    def check_coeffs(self, c):
        c = np.asarray(c, dtype=float)
        if c.shape != (self.m,):
            raise ValueError(f"expected {self.m} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        return c

    def split(self, c):
        """Coefficient vector -> (c_x, c_y, c_z) per-axis views."""
        c = self.check_coeffs(c)
        nx, ny = len(self.x), len(self.y)
        return c[:nx], c[nx:nx + ny], c[nx + ny:]


def curvature(basis, c, s):
    """u(s) = Phi(s) @ c; shape (3,) for scalar s, (n, 3) for arrays."""
    c = basis.check_coeffs(c)
    return basis.matrix(s) @ c


def identity_basis(length):
    """Constant-curvature basis: Phi(s) = I3 for all s."""
    return ModalBasis(x=(0,), y=(0,), z=(0,), length=length)
