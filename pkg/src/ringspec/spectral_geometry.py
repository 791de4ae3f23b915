"""Geometry from a truncated spectrum: improved heat sums and the staircase.

With ``u = E_n t`` the area approximants are

    A_m(t) = 4 pi sum_n (1/E_n) e^{-u} q_m(u)
    q_0 = u,  q_1 = 2u^2 - u,  q_2 = 2u^3 - 3u^2,  q_3 = (4u^4 - 12u^3 + 3u^2)/3

so ``dA_m/dt = 4 pi sum_n e^{-u} (q_m'(u) - q_m(u))``.  For a complete
spectrum every A_m(t) tends to the area as t -> 0; truncation spoils small
t.  The evaluation point is where A_1..A_3 are flattest in log t, the
minimizer of ``sum_m (t dA_m/dt)^2``; the unweighted ``sum_m (dA_m/dt)^2``
is available as ``objective="plain"`` but drifts to the large-t tail,
where every derivative decays exponentially.

Length and constant come from a weighted least-squares fit of the heat sum
``K(t) = sum_n e^{-E_n t}`` to ``A/(4 pi t) - L/(8 sqrt(pi t)) + c0`` around
that point, with A held fixed.  The counting function
``A E/4pi - L sqrt(E)/4pi + C`` has the same constant (``c0 = C``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import AccuracyError, DomainError

__all__ = [
    "HeatSumSeries",
    "heat_sum",
    "area_approximant",
    "area_approximant_derivative",
    "OBJECTIVES",
    "optimal_t",
    "perimeter_constant_estimates",
    "GeometryEstimate",
    "estimate_geometry",
    "staircase",
    "approximant_curves",
]

_Q = (
    (np.array([0.0, 1.0])),
    (np.array([0.0, -1.0, 2.0])),
    (np.array([0.0, 0.0, -3.0, 2.0])),
    (np.array([0.0, 0.0, 1.0, -4.0, 4.0 / 3.0])),
)


@dataclass(frozen=True)
class HeatSumSeries:
    """Ascending positive energies, one entry per state."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float).ravel()
        if e.size == 0:
            raise DomainError("spectrum is empty")
        if not np.all(np.isfinite(e)) or np.any(e <= 0):
            raise DomainError("energies must be finite and positive")
        object.__setattr__(self, "energies", np.sort(e))

    def __len__(self) -> int:
        return len(self.energies)


def _as_series(series) -> HeatSumSeries:
    return series if isinstance(series, HeatSumSeries) else HeatSumSeries(series)


def _check_order(m: int) -> None:
    if m not in (0, 1, 2, 3):
        raise DomainError(f"approximant order must be 0..3, got {m}")


def _u(series: HeatSumSeries, t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    return np.multiply.outer(t, series.energies), t


def heat_sum(series, t):
    """``K(t) = sum_n exp(-E_n t)``."""
    series = _as_series(series)
    u, t = _u(series, t)
    out = np.exp(-u).sum(axis=-1)
    return float(out) if t.ndim == 0 else out


def area_approximant(series, m: int, t):
    """Improved area sum A_m(t), m = 0..3."""
    _check_order(m)
    series = _as_series(series)
    u, t = _u(series, t)
    q = np.polynomial.polynomial.polyval(u, _Q[m])
    out = 4 * math.pi * (np.exp(-u) * q / series.energies).sum(axis=-1)
    return float(out) if t.ndim == 0 else out


def area_approximant_derivative(series, m: int, t):
    """dA_m/dt, evaluated term by term."""
    _check_order(m)
    series = _as_series(series)
    u, t = _u(series, t)
    c = _Q[m]
    dq = np.polynomial.polynomial.polyder(c)
    g = np.polynomial.polynomial.polyval(u, dq) - np.polynomial.polynomial.polyval(u, c)
    out = 4 * math.pi * (np.exp(-u) * g).sum(axis=-1)
    return float(out) if t.ndim == 0 else out


OBJECTIVES = ("log", "plain")


def _objective(series: HeatSumSeries, t, kind: str = "log"):
    d2 = sum(area_approximant_derivative(series, m, t) ** 2 for m in (1, 2, 3))
    return d2 * np.asarray(t) ** 2 if kind == "log" else d2


def optimal_t(series, n_scan: int = 400, objective: str = "log") -> float:
    """Minimizer of ``sum_m (t A_m')^2`` (``"log"``) or ``sum_m A_m'^2``
    (``"plain"``), m = 1..3.

    Log-spaced scan over [0.1/E_max, 10/E_min], then a bounded scalar
    minimization between the neighbours of the best scan point.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    series = _as_series(series)
    e = series.energies
    ts = np.geomspace(0.1 / e[-1], 10.0 / e[0], n_scan)
    f = _objective(series, ts, objective)
    if not np.any(np.isfinite(f)):
        raise DomainError("objective is not finite anywhere on the scan")
    i = int(np.nanargmin(f))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, n_scan - 1)]
    # work in log t so the tolerance is relative
    res = minimize_scalar(lambda s: _objective(series, math.exp(s), objective),
                          bounds=(math.log(lo), math.log(hi)), method="bounded",
                          options={"xatol": 1e-10})
    t_best = math.exp(res.x) if res.fun <= f[i] else ts[i]
    return float(t_best)


def perimeter_constant_estimates(series, area_est: float, t_star: float | None = None,
                                 n_points: int = 64) -> tuple[float, float]:
    """``(L, C)`` from a fit of the heat sum on [t*/2, 2 t*] with A fixed.

    The residual ``K(t) - A/(4 pi t)`` is fitted by ``-L/(8 sqrt(pi t)) + C``
    on ``n_points`` log-spaced t values with weights ``1/K(t)``.
    """
    series = _as_series(series)
    if not area_est > 0:
        raise DomainError("area estimate must be positive")
    if t_star is None:
        t_star = optimal_t(series)
    ts = np.geomspace(t_star / 2, 2 * t_star, n_points)
    k = heat_sum(series, ts)
    rhs = k - area_est / (4 * math.pi * ts)
    design = np.column_stack([-1.0 / (8 * np.sqrt(math.pi * ts)), np.ones_like(ts)])
    w = 1.0 / k
    coef, _, rank, sv = np.linalg.lstsq(design * w[:, None], rhs * w, rcond=None)
    if rank < 2 or sv[-1] < 1e-12 * sv[0]:
        raise AccuracyError("perimeter/constant fit is singular")
    return float(coef[0]), float(coef[1])


@dataclass(frozen=True)
class GeometryEstimate:
    t_star: float
    area: float
    perimeter: float
    constant: float
    area_spread: float
    approximants: tuple


def estimate_geometry(series, order: int = 3, objective: str = "log") -> GeometryEstimate:
    """Area (``A_order`` at t*), perimeter and constant from one spectrum.

    ``area_spread`` is the max-min spread of A_1..A_3 over [t*/2, 2t*].
    """
    series = _as_series(series)
    t_star = optimal_t(series, objective=objective)
    values = tuple(area_approximant(series, m, t_star) for m in range(4))
    area = values[order]
    ts = np.geomspace(t_star / 2, 2 * t_star, 64)
    window = np.array([area_approximant(series, m, ts) for m in (1, 2, 3)])
    spread = float(window.max() - window.min())
    l_est, c_est = perimeter_constant_estimates(series, area, t_star)
    return GeometryEstimate(t_star, area, l_est, c_est, spread, values)


def staircase(energies, e):
    """Number of states with energy <= e."""
    es = np.sort(np.asarray(energies, dtype=float).ravel())
    out = np.searchsorted(es, e, side="right")
    return int(out) if np.ndim(e) == 0 else out


def approximant_curves(series, t_grid) -> dict:
    """A_0..A_3 on ``t_grid`` (for plotting)."""
    series = _as_series(series)
    t = np.asarray(t_grid, dtype=float)
    out = {"t": t}
    for m in range(4):
        out[f"A{m}"] = area_approximant(series, m, t)
    return out
