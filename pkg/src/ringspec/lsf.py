"""Little Sinc Functions on [-L, L] and their second-derivative matrices.

Two families are used:

periodic (LSF1)
    ``N + 1`` functions, k = -N/2 .. N/2, nodes ``x_k = 2 L k / (N + 1)``::

        s_k(x) = (-1)^k / (N+1) * sin((N+1) pi x / 2L) / sin(pi x / 2L - pi k / (N+1))

dirichlet (LSF2)
    ``N - 1`` functions, k = -N/2+1 .. N/2-1, nodes ``x_k = 2 L k / N``::

        s_k(x) = (-1)^k / N * cos(pi k / N) sin(N pi x / 2L) / (sin(pi x / 2L) - sin(pi k / N))

Both are cardinal (1 at their own node, 0 at the others).  They are
evaluated through algebraically identical forms written in terms of the
offset from the node, which removes the 0/0 at ``x = x_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "PERIODIC",
    "DIRICHLET",
    "LsfBasis",
    "lsf_value",
    "interpolate",
    "second_derivative_matrix",
]

PERIODIC = "periodic"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class LsfBasis:
    kind: str
    n: int
    half_width: float

    def __post_init__(self):
        if self.kind not in (PERIODIC, DIRICHLET):
            raise ValueError(f"kind must be {PERIODIC!r} or {DIRICHLET!r}")
        if self.n < 2 or self.n % 2:
            raise ValueError(f"n must be an even integer >= 2, got {self.n}")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def size(self) -> int:
        return self.n + 1 if self.kind == PERIODIC else self.n - 1

    @property
    def indices(self) -> np.ndarray:
        """Signed indices k in ascending order."""
        if self.kind == PERIODIC:
            return np.arange(-self.n // 2, self.n // 2 + 1)
        return np.arange(-self.n // 2 + 1, self.n // 2)

    @property
    def spacing(self) -> float:
        return 2 * self.half_width / (self.n + 1 if self.kind == PERIODIC else self.n)

    @property
    def nodes(self) -> np.ndarray:
        return self.spacing * self.indices

    def offset(self, k: int) -> int:
        """Storage position of signed index ``k``."""
        lo = int(self.indices[0])
        if not lo <= k <= int(self.indices[-1]) or int(k) != k:
            raise IndexError(f"index {k} out of range for {self.kind} basis with n={self.n}")
        return int(k) - lo


def _periodic_value(n: int, half: float, k: int, x: np.ndarray) -> np.ndarray:
    m = n + 1
    u = np.pi * (x - 2 * half * k / m) / (2 * half)
    den = m * np.sin(u)
    num = np.sin(m * u)
    out = np.empty_like(u)
    tiny = np.abs(den) < 1e-300
    out[~tiny] = num[~tiny] / den[~tiny]
    # den = 0 only at u = j*pi, where the limit is cos(m u)/cos(u) = (+-1)^...
    out[tiny] = np.cos(m * u[tiny]) / np.cos(u[tiny])
    return out


def _dirichlet_value(n: int, half: float, k: int, x: np.ndarray) -> np.ndarray:
    phi = np.pi * x / (2 * half)
    phik = np.pi * k / n
    d = phi - phik
    num = np.cos(phik) * np.sin(n * d)
    den = 2 * n * np.cos(0.5 * (phi + phik)) * np.sin(0.5 * d)
    out = np.empty_like(phi)
    tiny = np.abs(den) < 1e-300
    out[~tiny] = num[~tiny] / den[~tiny]
    out[tiny] = 1.0
    return out


def lsf_value(basis: LsfBasis, k: int, x):
    """Value of the k-th basis function (signed k) at ``x``."""
    basis.offset(k)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if basis.kind == PERIODIC:
        out = _periodic_value(basis.n, basis.half_width, int(k), xa)
    else:
        out = _dirichlet_value(basis.n, basis.half_width, int(k), xa)
    return float(out[0]) if np.ndim(x) == 0 else out


def interpolate(basis: LsfBasis, node_values: Sequence[float], x):
    """Evaluate ``sum_k f(x_k) s_k(x)``."""
    vals = np.asarray(node_values, dtype=float)
    if vals.shape != (basis.size,):
        raise ValueError(f"expected {basis.size} node values, got {vals.shape}")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(xa)
    for f, k in zip(vals, basis.indices):
        if f != 0.0:
            out += f * lsf_value(basis, int(k), xa)
    return float(out[0]) if np.ndim(x) == 0 else out


def second_derivative_matrix(basis: LsfBasis) -> np.ndarray:
    """``c[k, j] = s_k''(x_j)`` in closed form (storage order of ``indices``).

    periodic, M = N + 1, w = pi / L, d = j - k::

        c_kk = -w^2 (M^2 - 1) / 12
        c_kj = -(w^2 / 2) (-1)^d cos(pi d / M) / sin^2(pi d / M)

    dirichlet, f = (pi / 2L)^2, phi_k = pi k / N::

        c_kk = f [1 / (2 cos^2 phi_k) - (2 N^2 + 1) / 6]
        c_kj = -2 f (-1)^(j+k) cos phi_j cos phi_k / (sin phi_j - sin phi_k)^2
    """
    n, half = basis.n, basis.half_width
    k = basis.indices
    if basis.kind == PERIODIC:
        m = n + 1
        w2 = (np.pi / half) ** 2
        d = k[None, :] - k[:, None]
        off = d != 0
        ang = np.pi * d / m
        sign = np.where(d % 2 == 0, 1.0, -1.0)
        c = np.full(d.shape, -w2 * (m * m - 1) / 12.0)
        c[off] = -0.5 * w2 * sign[off] * np.cos(ang[off]) / np.sin(ang[off]) ** 2
        return c
    f = (np.pi / (2 * half)) ** 2
    phi = np.pi * k / n
    cs, sn = np.cos(phi), np.sin(phi)
    s = k[:, None] + k[None, :]
    sign = np.where(s % 2 == 0, 1.0, -1.0)
    diff = sn[None, :] - sn[:, None]
    np.fill_diagonal(diff, 1.0)
    c = -2 * f * sign * np.outer(cs, cs) / diff**2
    np.fill_diagonal(c, f * (0.5 / cs**2 - (2 * n * n + 1) / 6.0))
    return c
