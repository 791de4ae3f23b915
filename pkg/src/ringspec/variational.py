"""Ground-state bounds from one application of the inverse operator.

A trial state ``chi = sum_k c_k |k>`` in a finite set of rectangle modes is
mapped to ``Psi = O^{-1} chi``.  With every intermediate sum truncated to
the same modes, the Rayleigh quotient of ``O`` in ``Psi`` is

    E(c) = c^T Q c / c^T P c,   Q = M E^-1 M,   P = M E^-1 S E^-1 M,

where ``M = <Sigma^(1/2)>``, ``S = <Sigma>`` and ``E = diag(eps)``.  Its
minimum is the smallest eigenvalue of the pencil (Q, P).  Because M is
symmetric positive definite, the substitution ``u = E^-1 M c`` turns the
pencil into ``(diag(eps), S)``, whose smallest eigenvalue is
``1 / lambda_max(E^-1/2 S E^-1/2)``.  That form stays well conditioned
when the (Q, P) pencil does not and is used by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytic import RectQuantumNumbers, unperturbed_energy
from .conformal import PowerSeriesMap, annulus_map, sigma
from .errors import AccuracyError, DegeneracyError, DomainError
from .linalg import gauss_legendre, gen_sym_eig, periodic_trapezoid, sym_eig

__all__ = [
    "ANGULAR",
    "RADIAL",
    "TrialBasis",
    "sigma_half_element_radial",
    "sigma_element_radial",
    "pencil",
    "minimize_pencil",
    "variational_ground_annulus",
    "variational_ground_general",
    "BoundReport",
    "variational_upper_bound_check",
]

ANGULAR = "angular"
RADIAL = "radial"


@dataclass(frozen=True)
class TrialBasis:
    """Trial modes of the rectangle.

    ``radial``: ``psi_n(x) chi_0(y)`` for n = 1..size.
    ``angular``: ``psi_1(x)`` times chi_0, phi_1, chi_1, ..., phi_size,
    chi_size (phi = sine, chi = cosine), i.e. ``size`` harmonics and
    ``2 size + 1`` functions; size 0 is the single rotationally
    symmetric mode.
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in (ANGULAR, RADIAL):
            raise DomainError(f"kind must be {ANGULAR!r} or {RADIAL!r}")
        low = 0 if self.kind == ANGULAR else 1
        if int(self.size) != self.size or self.size < low:
            raise DomainError(f"{self.kind} basis size must be an integer >= {low}")

    @property
    def modes(self) -> tuple[RectQuantumNumbers, ...]:
        if self.kind == RADIAL:
            return tuple(RectQuantumNumbers(n, 0, 1) for n in range(1, self.size + 1))
        out = [RectQuantumNumbers(1, 0, 1)]
        for ny in range(1, self.size + 1):
            out += [RectQuantumNumbers(1, ny, 2), RectQuantumNumbers(1, ny, 1)]
        return tuple(out)

    def __len__(self) -> int:
        return len(self.modes)


def _parity(m, l):
    return np.where((np.asarray(m) + np.asarray(l)) % 2 == 0, 1.0, -1.0)


def sigma_half_element_radial(m, l, lx: float):
    """``int psi_m psi_l e^(x-Lx) dx`` over [-Lx, Lx]."""
    m = np.asarray(m, dtype=float)
    l = np.asarray(l, dtype=float)
    pi2 = math.pi**2
    diag = pi2 * math.exp(-lx) * m * m * math.sinh(lx) / (lx**3 + pi2 * lx * m * m)
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (8 * pi2 * lx * m * l * (_parity(m, l) - math.exp(-2 * lx))
               / (16 * lx**4 + 8 * pi2 * lx * lx * (m * m + l * l) + pi2**2 * (m * m - l * l) ** 2))
    out = np.where(m == l, diag, off)
    return float(out) if out.ndim == 0 else out


def sigma_element_radial(m, l, lx: float):
    """``int psi_m psi_l e^(2x-2Lx) dx`` over [-Lx, Lx]."""
    m = np.asarray(m, dtype=float)
    l = np.asarray(l, dtype=float)
    pi2 = math.pi**2
    e4 = math.exp(-4 * lx)
    diag = pi2 * (1 - e4) * m * m / (4 * (4 * lx**3 + pi2 * lx * m * m))
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (16 * pi2 * lx * m * l * (_parity(m, l) - e4)
               / (256 * lx**4 + 32 * pi2 * lx * lx * (m * m + l * l) + pi2**2 * (m * m - l * l) ** 2))
    out = np.where(m == l, diag, off)
    return float(out) if out.ndim == 0 else out


def pencil(m_half: np.ndarray, s: np.ndarray, eps: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Numerator and denominator forms ``(Q, P)`` of the Rayleigh quotient."""
    inv = 1.0 / np.asarray(eps, dtype=float)
    em = inv[:, None] * m_half
    q = m_half @ em
    p = em.T @ s @ em
    return 0.5 * (q + q.T), 0.5 * (p + p.T)


def minimize_pencil(m_half: np.ndarray, s: np.ndarray, eps: Sequence[float],
                    method: str = "reduced") -> float:
    """Minimum of ``c^T Q c / c^T P c``.

    ``method="pencil"`` solves (Q, P) directly (Cholesky of P, which fails
    with :class:`DegeneracyError` when P is numerically singular);
    ``"reduced"`` uses the equivalent (diag(eps), S) form.
    """
    eps = np.asarray(eps, dtype=float)
    if method == "pencil":
        q, p = pencil(m_half, s, eps)
        return float(gen_sym_eig(q, p).values[0])
    if method != "reduced":
        raise ValueError(f"unknown method {method!r}")
    r = 1.0 / np.sqrt(eps)
    lam = sym_eig(r[:, None] * s * r[None, :]).values
    if not lam[0] > 0:
        raise DegeneracyError("<Sigma> block is not positive definite")
    return float(1.0 / lam[-1])


def _annulus_blocks(lx: float, basis: TrialBasis):
    modes = basis.modes
    if basis.kind == RADIAL:
        n = np.array([q.nx for q in modes])
        return (sigma_half_element_radial(n[:, None], n[None, :], lx),
                sigma_element_radial(n[:, None], n[None, :], lx))
    k = len(modes)
    return (np.eye(k) * sigma_half_element_radial(1, 1, lx),
            np.eye(k) * sigma_element_radial(1, 1, lx))


def variational_ground_annulus(a: float, basis: TrialBasis, method: str = "reduced") -> float:
    """Variational ground energy of the annulus a < r < 1 (closed-form elements)."""
    m = annulus_map(a)
    m_half, s = _annulus_blocks(m.lx, basis)
    eps = [unperturbed_energy(q, m.lx) for q in basis.modes]
    return minimize_pencil(m_half, s, eps, method)


def _mode_values(modes, x, y, lx):
    fx = np.array([np.sin(q.nx * math.pi * (x + lx) / (2 * lx)) / math.sqrt(lx) for q in modes])
    rows = []
    for q in modes:
        if q.ny == 0:
            rows.append(np.full_like(y, 1.0 / math.sqrt(2 * math.pi)))
        elif q.s == 1:
            rows.append(np.cos(q.ny * y) / math.sqrt(math.pi))
        else:
            rows.append(np.sin(q.ny * y) / math.sqrt(math.pi))
    return fx, np.array(rows)


def _quadrature_blocks(m: PowerSeriesMap, basis: TrialBasis, quad_n: int):
    modes = basis.modes
    x, wx = gauss_legendre(quad_n, -m.lx, m.lx)
    y, wy = periodic_trapezoid(quad_n, -math.pi, math.pi)
    sig = sigma(m, x[:, None], y[None, :])
    w = np.outer(wx, wy)
    fx, fy = _mode_values(modes, x, y, m.lx)
    f = fx[:, :, None] * fy[:, None, :]
    s = np.einsum("mxy,lxy,xy->ml", f, f, sig * w)
    mh = np.einsum("mxy,lxy,xy->ml", f, f, np.sqrt(sig) * w)
    return 0.5 * (mh + mh.T), 0.5 * (s + s.T)


def variational_ground_general(m: PowerSeriesMap, basis: TrialBasis, quad_n: int = 128,
                               method: str = "reduced", rtol: float = 1e-6) -> float:
    """Variational ground energy for any map, elements by 2-D quadrature.

    The result at ``quad_n`` is compared with ``2 quad_n``; a relative change
    above ``rtol`` raises :class:`AccuracyError`.  Returns the finer value
    divided by ``C^2``.
    """
    if quad_n < 8:
        raise ValueError("quad_n must be at least 8")
    eps = [unperturbed_energy(q, m.lx) for q in basis.modes]
    vals = []
    for n in (quad_n, 2 * quad_n):
        mh, s = _quadrature_blocks(m, basis, n)
        vals.append(minimize_pencil(mh, s, eps, method))
    if abs(vals[1] - vals[0]) > rtol * abs(vals[1]):
        raise AccuracyError(
            f"quadrature not converged: {vals[0]:.12g} (n={quad_n}) vs {vals[1]:.12g}")
    return vals[1] / m.c**2


@dataclass(frozen=True)
class BoundReport:
    sizes: tuple
    energies: tuple
    reference: float
    gaps: tuple
    increases: tuple
    violations: tuple

    @property
    def monotone(self) -> bool:
        return not self.increases

    @property
    def ok(self) -> bool:
        return self.monotone and not self.violations


def variational_upper_bound_check(m: PowerSeriesMap, kind: str, sizes: Sequence[int],
                                  reference: float, rtol: float = 1e-6,
                                  quad_n: int = 128) -> BoundReport:
    """Energies for each basis size, their relative gaps to ``reference``,
    the sizes where the energy went up, and those falling below the
    reference by more than ``rtol``.
    """
    sizes = tuple(int(n) for n in sizes)
    energies = []
    for n in sizes:
        basis = TrialBasis(kind, n)
        if m.is_annulus and m.c == 1.0:
            energies.append(variational_ground_annulus(math.exp(-2 * m.lx), basis))
        else:
            energies.append(variational_ground_general(m, basis, quad_n=quad_n))
    gaps = tuple((e - reference) / reference for e in energies)
    increases = tuple(sizes[i] for i in range(1, len(sizes))
                      if energies[i] > energies[i - 1] * (1 + 1e-10))
    violations = tuple(n for n, g in zip(sizes, gaps) if g < -rtol)
    return BoundReport(sizes, tuple(energies), float(reference), gaps, increases, violations)
