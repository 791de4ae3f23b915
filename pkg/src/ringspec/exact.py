"""Exact Dirichlet spectrum of the circular annulus a < r < b.

With ``beta = b/a`` the levels are ``E_mn = (k_mn / a)^2`` where ``k_mn`` is
the n-th positive root of ``Y_m(k) J_m(k beta) - J_m(k) Y_m(k beta)``.
Levels with m >= 1 are doubly degenerate (cos and sin of m*phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .special import roots_in_window, scan_step
from .spectrum import LabeledLevel, Spectrum

__all__ = ["AnnulusLevel", "annulus_levels", "annulus_spectrum", "level_count_below"]


@dataclass(frozen=True)
class AnnulusLevel:
    m: int
    n: int
    k: float
    energy: float
    multiplicity: int


def _check_radii(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b) and 0 < a < b):
        raise DomainError(f"need 0 < a < b, got a={a}, b={b}")


class _RootTable:
    """Per-order root lists, extended lazily as the k cutoff grows."""

    def __init__(self, a: float, b: float):
        self.a, self.beta = a, b / a
        self.roots: dict[int, list[float]] = {}
        self.reached: dict[int, float] = {}

    def upto(self, m: int, k_cut: float) -> list[float]:
        lo = self.reached.get(m, max(m / self.beta, 1e-6 * scan_step(self.beta, m)))
        found = self.roots.setdefault(m, [])
        if k_cut > lo:
            found.extend(roots_in_window(m, self.beta, lo, k_cut))
            self.reached[m] = k_cut
        return [k for k in found if k <= k_cut]

    def levels(self, e_cut: float) -> list[AnnulusLevel]:
        # scan a little past the cutoff: a root sitting at the window edge
        # shows no sign change there; the energy filter below trims the excess
        k_cut = self.a * math.sqrt(e_cut) * (1 + 1e-6)
        out = []
        prev_first = 0.0
        m = 0
        while True:
            ks = self.upto(m, k_cut)
            if not ks:
                break
            # first roots increase with m, so an empty order ends the scan
            assert ks[0] > prev_first or m == 0
            prev_first = ks[0]
            for n, k in enumerate(ks, start=1):
                e = (k / self.a) ** 2
                if e <= e_cut:
                    out.append(AnnulusLevel(m, n, k, e, 1 if m == 0 else 2))
            m += 1
        return out


def annulus_levels(a: float, b: float, e_max: float) -> list[AnnulusLevel]:
    """All distinct levels with E <= e_max, sorted by (E, m, n)."""
    _check_radii(a, b)
    if not e_max > 0:
        return []
    levels = _RootTable(a, b).levels(e_max)
    return sorted(levels, key=lambda lv: (lv.energy, lv.m, lv.n))


def level_count_below(a: float, b: float, e_max: float) -> int:
    """Number of states (with multiplicity) with E <= e_max."""
    return sum(lv.multiplicity for lv in annulus_levels(a, b, e_max))


def annulus_spectrum(a: float, b: float = 1.0, n_states: int = 1) -> Spectrum:
    """Lowest ``n_states`` states of the annulus, counting multiplicity.

    The energy cutoff starts near the Weyl estimate and doubles until at
    least ``n_states`` states lie below it; every level below the cutoff is
    found, so the returned list has no gaps.
    """
    _check_radii(a, b)
    if n_states < 1:
        raise ValueError("n_states must be positive")
    table = _RootTable(a, b)
    # start near the Weyl estimate (with its perimeter term) or the thin-ring
    # ground level; a short guess only costs one more doubling
    area, perim = math.pi * (b * b - a * a), 2 * math.pi * (a + b)
    root = (perim + math.sqrt(perim * perim + 16 * math.pi * area * n_states)) / (2 * area)
    e_cut = max(root * root, (math.pi / (b - a)) ** 2) * 1.1
    while True:
        levels = table.levels(e_cut)
        if sum(lv.multiplicity for lv in levels) >= n_states:
            break
        e_cut *= 2.0
    levels.sort(key=lambda lv: (lv.energy, lv.m, lv.n))
    states = []
    for lv in levels:
        for s in range(1, lv.multiplicity + 1):
            states.append(LabeledLevel(lv.energy, (lv.m, lv.n), s, lv.multiplicity, "exact"))
    return Spectrum(tuple(states[:n_states]))
