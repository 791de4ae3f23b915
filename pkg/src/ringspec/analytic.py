"""Resummed first-order energies E ~ eps / <Sigma> and Weyl's law.

The rectangle [-Lx, Lx] x [-pi, pi] (Dirichlet in x, periodic in y) has
eigenfunctions ``Psi = psi_nx(x) * alpha_ny * {cos, sin}(ny y)`` with::

    psi_n(x) = sin(n pi (x + Lx) / (2 Lx)) / sqrt(Lx)
    alpha_0 = 1/sqrt(2 pi),  alpha_ny = 1/sqrt(pi)
    eps = nx^2 pi^2 / (4 Lx^2) + ny^2

and ``s = 1`` (cosine) or ``s = 2`` (sine).  The ring energies are
approximated by ``eps / <Psi|Sigma|Psi>``, divided by ``C^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conformal import PowerSeriesMap, RingGeometry
from .errors import DegeneracyError, DomainError
from .spectrum import LabeledLevel, Spectrum

__all__ = [
    "RectQuantumNumbers",
    "unperturbed_energy",
    "w_element",
    "i_element",
    "delta_element",
    "sigma_matrix_element",
    "sigma_expectation",
    "resummed_energy",
    "annulus_formula",
    "robnik_formula",
    "robnik_correction",
    "enumerate_analytic",
    "weyl_energy",
    "counting_estimate",
]


@dataclass(frozen=True)
class RectQuantumNumbers:
    nx: int
    ny: int = 0
    s: int = 1

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 1:
            raise DomainError(f"nx must be a positive integer, got {self.nx}")
        if int(self.ny) != self.ny or self.ny < 0:
            raise DomainError(f"ny must be a non-negative integer, got {self.ny}")
        if self.s not in (1, 2):
            raise DomainError(f"s must be 1 or 2, got {self.s}")
        if self.ny == 0 and self.s != 1:
            raise DomainError("ny = 0 exists only for s = 1")


def unperturbed_energy(q: RectQuantumNumbers, lx: float) -> float:
    """Rectangle eigenvalue ``nx^2 pi^2 / (4 Lx^2) + ny^2``."""
    return q.nx**2 * math.pi**2 / (4 * lx * lx) + q.ny**2


def w_element(nx, nxp, k: int, j: int, lx: float):
    """``int psi_nx exp((k+j+2)(x-Lx)) psi_nxp dx`` in closed form.

    ``nx`` and ``nxp`` may be integer arrays (broadcast).
    """
    n = np.asarray(nx, dtype=float)
    m = np.asarray(nxp, dtype=float)
    p = k + j + 2
    sign = np.where((np.asarray(nx) + np.asarray(nxp)) % 2 == 0, 1.0, -1.0)
    q = 4 * lx * lx * p * p
    num = 8 * math.pi**2 * lx * n * m * p * (sign - math.exp(-2 * lx * p))
    out = num / ((q + math.pi**2 * (n - m) ** 2) * (q + math.pi**2 * (n + m) ** 2))
    return float(out) if out.ndim == 0 else out


def i_element(s: int, ny: int, nyp: int, d: int) -> float:
    """``int cos/sin(ny y) cos/sin(nyp y) cos(d y) dy`` over [-pi, pi] (s = 1 / 2)."""
    if s not in (1, 2):
        raise DomainError("s must be 1 or 2")
    sgn = 1.0 if s == 1 else -1.0
    hit = lambda v: 1.0 if v == 0 else 0.0  # noqa: E731
    return 0.5 * math.pi * (hit(ny - nyp + d) + sgn * hit(ny + nyp + d)
                            + hit(ny - nyp - d) + sgn * hit(ny + nyp - d))


def _alpha(ny: int, s: int) -> float:
    if ny == 0:
        return 1.0 / math.sqrt(2 * math.pi) if s == 1 else 0.0
    return 1.0 / math.sqrt(math.pi)


def delta_element(q: RectQuantumNumbers, qp: RectQuantumNumbers, k: int, j: int,
                  lx: float) -> float:
    """``<q| exp((k+j+2)(x-Lx)) cos((k-j) y) |q'>``; zero unless s = s'."""
    if q.s != qp.s:
        return 0.0
    return (_alpha(q.ny, q.s) * _alpha(qp.ny, qp.s) * w_element(q.nx, qp.nx, k, j, lx)
            * i_element(q.s, q.ny, qp.ny, k - j))


def sigma_matrix_element(m: PowerSeriesMap, q: RectQuantumNumbers,
                         qp: RectQuantumNumbers) -> float:
    """``<q|Sigma - 1|q'>`` for the unscaled map."""
    total = -1.0 if q == qp else 0.0
    for k, ek in enumerate(m.eta):
        for j, ej in enumerate(m.eta):
            if ek and ej:
                total += ek * ej * (k + 1) * (j + 1) * delta_element(q, qp, k, j, m.lx)
    return total


def sigma_expectation(m: PowerSeriesMap, q: RectQuantumNumbers, nx=None):
    """``<q|Sigma|q>``: the diagonal sum plus half-weight shifted sums.

    Shifted terms pair eta_k with eta_{k +- 2 ny} and carry the sign
    (-1)^(s+1); for ny = 0 only the diagonal survives.  ``nx`` may be an
    integer array to evaluate many radial numbers at once.
    """
    nx = q.nx if nx is None else np.asarray(nx)
    eta = m.eta
    total = 0.0
    for k, ek in enumerate(eta):
        total = total + ek * ek * (k + 1) ** 2 * w_element(nx, nx, k, k, m.lx)
    if q.ny > 0:
        sgn = 1.0 if q.s == 1 else -1.0
        d = 2 * q.ny
        for k in range(d, len(eta)):
            j = k - d
            if eta[k] and eta[j]:
                # the (k, k-d) and (k-d, k) terms are equal; each has weight 1/2
                total = total + sgn * eta[k] * eta[j] * (k + 1) * (j + 1) * w_element(
                    nx, nx, k, j, m.lx)
    return total


def _has_split(m: PowerSeriesMap, ny: int) -> bool:
    if ny == 0:
        return False
    d = 2 * ny
    return any(m.eta[k] and m.eta[k - d] for k in range(d, len(m.eta)))


def resummed_energy(m: PowerSeriesMap, q: RectQuantumNumbers) -> float:
    """``eps / <Sigma>``, rescaled by ``1/C^2``."""
    sig = sigma_expectation(m, q)
    if not sig > 0:
        raise DegeneracyError(f"<Sigma> = {sig} is not positive for {q}")
    return unperturbed_energy(q, m.lx) / sig / m.c**2


def _check_a(a):
    if not np.all((np.asarray(a) > 0) & (np.asarray(a) < 1)):
        raise DomainError("a must lie in (0, 1)")


def annulus_formula(a, nx, ny):
    """Closed form of the resummed energy for the annulus a < r < 1."""
    _check_a(a)
    la = np.log(a)
    n2 = np.asarray(nx, dtype=float) ** 2
    m2 = np.asarray(ny, dtype=float) ** 2
    pi2 = math.pi**2
    out = 2 * (la * la + pi2 * n2) * (m2 * la * la + pi2 * n2) / (pi2 * (a * a - 1) * n2 * la)
    return float(out) if np.ndim(out) == 0 else out


def robnik_correction(a, nx):
    """alpha^2 coefficient in the denominator of :func:`robnik_formula`.

    ``2 pi^2 (a^4 - 1) nx^2 log a (log^2 a + pi^2 nx^2) / (4 log^2 a + pi^2 nx^2)``
    """
    la = np.log(a)
    n2 = np.asarray(nx, dtype=float) ** 2
    pi2 = math.pi**2
    return 2 * pi2 * (a**4 - 1) * n2 * la * (la * la + pi2 * n2) / (4 * la * la + pi2 * n2)


def robnik_formula(a, alpha: float, nx, ny):
    """Resummed energy of the ring ``e^(z-Lx) + alpha e^(2(z-Lx))``, a = e^(-2 Lx)."""
    _check_a(a)
    la = np.log(a)
    n2 = np.asarray(nx, dtype=float) ** 2
    m2 = np.asarray(ny, dtype=float) ** 2
    pi2 = math.pi**2
    num = 2 * (la * la + pi2 * n2) * (m2 * la * la + pi2 * n2)
    den = pi2 * (a * a - 1) * n2 * la + alpha**2 * robnik_correction(a, nx)
    out = num / den
    return float(out) if np.ndim(out) == 0 else out


def _row_energies(m: PowerSeriesMap, nxs: np.ndarray, ny: int, s: int,
                  closed_form: bool) -> np.ndarray:
    a = math.exp(-2 * m.lx)
    if closed_form and m.is_annulus:
        return annulus_formula(a, nxs, ny) / m.c**2
    if closed_form and len(m.eta) == 2:
        return robnik_formula(a, m.eta[1], nxs, ny) / m.c**2
    q = RectQuantumNumbers(1, ny, s)
    eps = nxs**2 * math.pi**2 / (4 * m.lx**2) + ny**2
    sig = sigma_expectation(m, q, nx=nxs)
    if np.any(sig <= 0):
        raise DegeneracyError(f"<Sigma> not positive for ny={ny}, s={s}")
    return eps / sig / m.c**2


def _levels_below(m: PowerSeriesMap, e_cut: float, closed_form: bool) -> list[LabeledLevel]:
    # <Sigma> <= max Sigma, so E <= e_cut needs eps <= e_cut * C^2 * max Sigma
    eps_max = e_cut * m.c**2 * m.sigma_bound
    nx_max = int(2 * m.lx * math.sqrt(eps_max) / math.pi)
    out = []
    for ny in range(int(math.sqrt(eps_max)) + 1):
        rest = eps_max - ny * ny
        nx_top = min(nx_max, int(2 * m.lx * math.sqrt(max(rest, 0.0)) / math.pi))
        if nx_top < 1:
            continue
        nxs = np.arange(1, nx_top + 1)
        split = _has_split(m, ny)
        for s in ((1, 2) if split else (1,)):
            es = _row_energies(m, nxs, ny, s, closed_form)
            for nx, e in zip(nxs[es <= e_cut], es[es <= e_cut]):
                if ny == 0 or split:
                    out.append(LabeledLevel(float(e), (int(nx), ny), s, 1, "analytic"))
                else:
                    for ss in (1, 2):
                        out.append(LabeledLevel(float(e), (int(nx), ny), ss, 2, "analytic"))
    return out


def enumerate_analytic(m: PowerSeriesMap, n_states: int, closed_form: bool = True) -> Spectrum:
    """Lowest ``n_states`` resummed energies, one entry per state.

    Levels with ny > 0 appear twice: as a degenerate pair (multiplicity 2)
    when the formula does not depend on s, otherwise as two s-split levels.
    The energy cutoff doubles until enough states are found; every state
    below it is included.
    """
    if n_states < 1:
        raise ValueError("n_states must be positive")
    e_cut = 2.0 * resummed_energy(m, RectQuantumNumbers(1, 0, 1))
    while True:
        levels = _levels_below(m, e_cut, closed_form)
        if len(levels) >= n_states:
            break
        e_cut *= 2.0
    return Spectrum(tuple(levels)).first(n_states)


def weyl_energy(n, geom: RingGeometry):
    """E with ``A E / 4pi - L sqrt(E) / 4pi + C = n`` (positive root in sqrt E)."""
    a, l, c = geom.area, geom.perimeter_total, geom.euler_constant
    n = np.asarray(n, dtype=float)
    root = (l + np.sqrt(l * l + 16 * math.pi * a * (n - c))) / (2 * a)
    out = root * root
    return float(out) if out.ndim == 0 else out


def counting_estimate(e, geom: RingGeometry):
    """Smoothed counting function ``A E / 4pi - L sqrt(E) / 4pi + C``."""
    e = np.asarray(e, dtype=float)
    if np.any(e < 0):
        raise DomainError("energy must be non-negative")
    out = (geom.area * e - geom.perimeter_total * np.sqrt(e)) / (4 * math.pi) + geom.euler_constant
    return float(out) if out.ndim == 0 else out
