"""Conformal maps from the rectangle [-Lx, Lx] x [-pi, pi] onto rings.

Maps are polynomials in ``e^(z - Lx)``::

    g(z) = C * sum_k eta_k * exp((k + 1)(z - Lx)),   eta_0 = 1

The horizontal sides are identified (periodic in y), the vertical sides go
to the outer (x = Lx) and inner (x = -Lx) boundaries.  The conformal
density of the *unscaled* map is ``Sigma = |d gbar/dz|^2``; physical
energies are the unscaled ones divided by ``C^2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegeneracyError, DomainError
from .linalg import gauss_legendre, periodic_trapezoid

__all__ = [
    "PowerSeriesMap",
    "RingGeometry",
    "map_point",
    "sigma",
    "sigma_double_sum",
    "geometry",
    "robnik_widths",
    "rescale_energy",
    "annulus_map",
    "robnik_map",
    "load_map",
]

_PROBE = 64


@dataclass(frozen=True)
class PowerSeriesMap:
    lx: float
    c: float = 1.0
    eta: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(float(e) for e in self.eta))
        if not (math.isfinite(self.lx) and self.lx > 0):
            raise DomainError(f"lx must be positive, got {self.lx}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise DomainError(f"c must be positive, got {self.c}")
        if not self.eta or self.eta[0] != 1.0:
            raise DomainError("eta must start with eta_0 = 1")
        if not all(math.isfinite(e) for e in self.eta):
            raise DomainError("eta must be finite")
        # g' = w P(w) with w = e^(z-Lx), |w| in [e^(-2Lx), 1] on the rectangle;
        # a root of P there is an interior critical point the probe may miss
        poly = [e * (k + 1) for k, e in enumerate(self.eta)]
        if len(poly) > 1 and any(poly[1:]):
            while poly[-1] == 0.0:
                poly.pop()
            for r in np.roots(poly[::-1]):
                if math.exp(-2 * self.lx) * (1 - 1e-12) <= abs(r) <= 1 + 1e-12:
                    raise DegeneracyError(
                        f"map is not conformal on the rectangle: g' vanishes at "
                        f"z = {complex(np.log(complex(r))) + self.lx:.6g}")
        x = np.linspace(-self.lx, self.lx, _PROBE)
        y = np.linspace(-np.pi, np.pi, _PROBE)
        s = _sigma(self, x[:, None], y[None, :])
        if not np.all(s > 0):
            i, j = np.unravel_index(np.argmin(s), s.shape)
            raise DegeneracyError(
                f"map is not conformal on the rectangle: Sigma={s[i, j]:.3g} "
                f"at (x, y)=({x[i]:.4g}, {y[j]:.4g})")

    @property
    def is_annulus(self) -> bool:
        return all(e == 0.0 for e in self.eta[1:])

    @property
    def sigma_bound(self) -> float:
        """Upper bound of Sigma on the rectangle, ``(sum |eta_k| (k+1))^2``."""
        return sum(abs(e) * (k + 1) for k, e in enumerate(self.eta)) ** 2

    def to_dict(self) -> dict:
        return {"lx": self.lx, "c": self.c, "eta": list(self.eta)}

    @classmethod
    def from_dict(cls, d: dict) -> "PowerSeriesMap":
        try:
            return cls(lx=float(d["lx"]), c=float(d.get("c", 1.0)),
                       eta=tuple(d.get("eta", [1.0])))
        except KeyError as exc:
            raise DomainError(f"map description lacks {exc}") from None


def load_map(path) -> PowerSeriesMap:
    """Read a map from a JSON file ``{"lx": .., "c": .., "eta": [..]}``."""
    with open(Path(path)) as fh:
        return PowerSeriesMap.from_dict(json.load(fh))


def _derivative(m: PowerSeriesMap, z):
    # d gbar / dz = sum_k eta_k (k+1) e^{(k+1)(z-Lx)}
    w = np.exp(z - m.lx)
    out = np.zeros_like(w)
    for k in reversed(range(len(m.eta))):
        out = out * w + m.eta[k] * (k + 1)
    return out * w


def _sigma(m: PowerSeriesMap, x, y):
    d = _derivative(m, np.asarray(x) + 1j * np.asarray(y))
    return d.real**2 + d.imag**2


def map_point(m: PowerSeriesMap, x, y, scaled: bool = False):
    """Image ``gbar(x + iy)`` as a (u, v) pair; ``scaled`` multiplies by C."""
    z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    w = np.exp(z - m.lx)
    g = np.zeros_like(w)
    for k in reversed(range(len(m.eta))):
        g = g * w + m.eta[k]
    g = g * w
    if scaled:
        g = g * m.c
    if np.ndim(g) == 0:
        return float(g.real), float(g.imag)
    return g.real, g.imag


def sigma(m: PowerSeriesMap, x, y):
    """Conformal density of the unscaled map, ``|gbar'(x + iy)|^2``."""
    s = _sigma(m, x, y)
    if np.any(s <= 0):
        raise DegeneracyError("Sigma <= 0: map is not conformal at the requested point")
    return float(s) if np.ndim(s) == 0 else s


def sigma_double_sum(m: PowerSeriesMap, x, y):
    """Sigma from the real double series in cos(y (k - j)).

    Slower than :func:`sigma`; kept as an independent evaluation path.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    for k, ek in enumerate(m.eta):
        for j, ej in enumerate(m.eta):
            out = out + (ek * ej * (k + 1) * (j + 1)
                         * np.exp((k + j + 2) * (x - m.lx)) * np.cos(y * (k - j)))
    return out


@dataclass(frozen=True)
class RingGeometry:
    area: float
    perimeter_outer: float
    perimeter_inner: float
    euler_constant: float = 0.0
    perimeter_total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "perimeter_total",
                           self.perimeter_outer + self.perimeter_inner)


def geometry(m: PowerSeriesMap, quad_n: int = 256) -> RingGeometry:
    """Area and boundary lengths of the ring by quadrature of the density.

    ``A = C^2 * int Sigma dx dy`` (Gauss in x, trapezoid in y) and
    ``L = C * int sqrt(Sigma) dy`` along each vertical side.
    """
    if quad_n < 2:
        raise ValueError("quad_n must be at least 2")
    x, wx = gauss_legendre(quad_n, -m.lx, m.lx)
    y, wy = periodic_trapezoid(quad_n, -np.pi, np.pi)
    s = sigma(m, x[:, None], y[None, :])
    area = m.c**2 * float(wx @ s @ wy)
    outer = m.c * float(np.sqrt(sigma(m, m.lx, y)) @ wy)
    inner = m.c * float(np.sqrt(sigma(m, -m.lx, y)) @ wy)
    return RingGeometry(area=area, perimeter_outer=outer, perimeter_inner=inner)


def robnik_widths(alpha: float, lx: float) -> tuple[float, float, float]:
    """Smallest, largest and mean width of the ring e^(z-Lx) + alpha e^(2(z-Lx))."""
    if not lx > 0:
        raise DomainError("lx must be positive")
    base = 1.0 - math.exp(-2 * lx)
    spread = abs(alpha) * (1.0 - math.exp(-4 * lx))
    return base - spread, base + spread, base


def rescale_energy(energy_unscaled, c: float):
    """Energy of the dilated ring: ``E = Ebar / C^2``."""
    if not c > 0:
        raise DomainError("c must be positive")
    return energy_unscaled / c**2


def annulus_map(a: float) -> PowerSeriesMap:
    """Exponential map onto the annulus a < r < 1."""
    if not 0 < a < 1:
        raise DomainError(f"inner radius must lie in (0, 1), got {a}")
    return PowerSeriesMap(lx=-math.log(a) / 2, c=1.0, eta=(1.0,))


def robnik_map(alpha: float, lx: float, c: float = 1.0) -> PowerSeriesMap:
    """``e^(z-Lx) + alpha e^(2(z-Lx))``: a circular ring deformed towards a cardioid."""
    return PowerSeriesMap(lx=lx, c=c, eta=(1.0, alpha))
