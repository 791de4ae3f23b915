"""Integer-order Bessel functions and the annulus cross-product.

``J_m`` and ``Y_m`` come from SciPy's AMOS/Cephes wrappers.  The
cross-product ``Y_m(k) J_m(k beta) - J_m(k) Y_m(k beta)`` is also
available in a phase form,

    sin(theta_m(k) - theta_m(k beta)),   theta_m = atan2(Y_m, J_m),

which equals the cross-product divided by the (positive) Hankel moduli
``|H_m(k)| |H_m(k beta)|``.  It has exactly the same zeros, stays bounded,
and survives the underflow of ``J_m`` / overflow of ``Y_m`` at large order.
All root searches use it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError, RingSpecError
from .linalg import refine_root

__all__ = [
    "bessel_j",
    "bessel_y",
    "bessel_jp",
    "bessel_yp",
    "bessel_phase",
    "cross_product",
    "cross_product_scaled",
    "cross_product_roots",
    "roots_in_window",
    "scan_step",
]


def _order(m) -> int:
    if int(m) != m or m < 0:
        raise DomainError(f"order must be a non-negative integer, got {m!r}")
    return int(m)


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


def _argument(x, strict: bool) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    bad = (xa <= 0) if strict else (xa < 0)
    if np.any(bad) or np.any(np.isnan(xa)):
        raise DomainError("argument must be " + ("> 0" if strict else ">= 0"))
    return xa


def bessel_j(m, x):
    """J_m(x) for x >= 0."""
    m = _order(m)
    return _scalar_or_array(x, _sp.jv(m, _argument(x, strict=False)))


def bessel_y(m, x):
    """Y_m(x) for x > 0."""
    m = _order(m)
    return _scalar_or_array(x, _sp.yv(m, _argument(x, strict=True)))


def bessel_jp(m, x):
    """dJ_m/dx from the recurrence (J_{m-1} - J_{m+1}) / 2."""
    m = _order(m)
    xa = _argument(x, strict=False)
    if m == 0:
        return _scalar_or_array(x, -_sp.jv(1, xa))
    return _scalar_or_array(x, 0.5 * (_sp.jv(m - 1, xa) - _sp.jv(m + 1, xa)))


def bessel_yp(m, x):
    """dY_m/dx from the recurrence (Y_{m-1} - Y_{m+1}) / 2."""
    m = _order(m)
    xa = _argument(x, strict=True)
    if m == 0:
        return _scalar_or_array(x, -_sp.yv(1, xa))
    return _scalar_or_array(x, 0.5 * (_sp.yv(m - 1, xa) - _sp.yv(m + 1, xa)))


def bessel_phase(m, x):
    """Phase theta_m(x) = atan2(Y_m(x), J_m(x)) in (-pi, pi]."""
    m = _order(m)
    xa = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        th = np.arctan2(_sp.yv(m, xa), _sp.jv(m, xa))
    return _scalar_or_array(x, th)


def _check_cross_args(k, beta):
    if np.any(np.asarray(k) <= 0):
        raise DomainError("cross_product needs k > 0")
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")


def cross_product(m, k, beta):
    """Y_m(k) J_m(k beta) - J_m(k) Y_m(k beta)."""
    m = _order(m)
    _check_cross_args(k, beta)
    ka = np.asarray(k, dtype=float)
    out = _sp.yv(m, ka) * _sp.jv(m, ka * beta) - _sp.jv(m, ka) * _sp.yv(m, ka * beta)
    return _scalar_or_array(k, out)


def cross_product_scaled(m, k, beta):
    """Cross-product divided by the Hankel moduli at k and k*beta.

    Same sign and zero set as :func:`cross_product`, bounded by 1 in
    magnitude, free of 0*inf at high order.
    """
    m = _order(m)
    _check_cross_args(k, beta)
    ka = np.asarray(k, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.sin(np.arctan2(_sp.yv(m, ka), _sp.jv(m, ka))
                     - np.arctan2(_sp.yv(m, ka * beta), _sp.jv(m, ka * beta)))
    return _scalar_or_array(k, out)


def scan_step(beta: float, m: int = 1) -> float:
    """Scan spacing in k that cannot skip a pair of roots.

    For m >= 1 the phase derivative 2/(pi x |H_m|^2) increases towards 1
    (x |H_m|^2 decreases for m > 1/2), so the phase difference
    theta(k beta) - theta(k) is nondecreasing with slope at most beta and
    consecutive roots are at least pi/beta apart.  Sixteen samples cover
    that distance.  For m = 0 the phase grows fast near the origin, so the
    step is also capped at 0.01.
    """
    h = math.pi / (16.0 * beta)
    return min(h, 0.01) if m == 0 else h


def _phase_rate(m: int, k: float) -> float:
    """theta_m'(k) = 2 / (pi k |H_m(k)|^2); 0 where |H_m| overflows."""
    with np.errstate(over="ignore", invalid="ignore"):
        mod2 = _sp.jv(m, k) ** 2 + _sp.yv(m, k) ** 2
    return 0.0 if not math.isfinite(mod2) else 2.0 / (math.pi * k * mod2)


def _scan_grid(m: int, beta: float, k_lo: float, k_hi: float, chunk: int = 64) -> np.ndarray:
    """Sample points on [k_lo, k_hi] no coarser than the root spacing allows.

    For m >= 1, theta_m' increases towards 1, so on a chunk starting at k0
    the phase difference grows with slope at most beta - theta_m'(k0); the
    step pi / (16 (beta - theta_m'(k0))) keeps sixteen samples per root
    spacing and widens to ~pi / (16 (beta - 1)) past the turning point.
    m = 0 uses the fixed :func:`scan_step`.
    """
    if m == 0:
        steps = max(1, int(math.ceil((k_hi - k_lo) / scan_step(beta, 0))))
        return np.linspace(k_lo, k_hi, steps + 1)
    pieces = [np.array([k_lo])]
    k = k_lo
    while k < k_hi:
        rate = min(_phase_rate(m, k), 1.0)
        h = math.pi / (16.0 * (beta - rate))
        n = min(chunk, max(1, int(math.ceil((k_hi - k) / h))))
        pts = k + h * np.arange(1, n + 1)
        pts[-1] = min(pts[-1], k_hi)
        pts = pts[pts <= k_hi]
        pieces.append(pts)
        k = float(pts[-1])
    return np.concatenate(pieces)


def roots_in_window(m: int, beta: float, k_lo: float, k_hi: float,
                    rtol: float = 1e-15) -> list[float]:
    """All cross-product roots in (k_lo, k_hi], ascending."""
    m = _order(m)
    if k_hi <= k_lo:
        return []
    ks = _scan_grid(m, beta, k_lo, k_hi)
    fs = cross_product_scaled(m, ks, beta)
    sg = np.sign(fs)
    idx = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
    roots = []
    f = lambda k: cross_product_scaled(m, k, beta)  # noqa: E731
    for i in idx:
        lo, hi = ks[i], ks[i + 1]
        roots.append(refine_root(f, (lo, hi), tol=rtol * hi))
    # exact zeros on grid nodes (interior only; the left end is excluded)
    for i in np.nonzero(sg[1:] == 0)[0]:
        roots.append(float(ks[i + 1]))
    roots.sort()
    return roots


def cross_product_roots(m, beta: float, count: int) -> list[float]:
    """First ``count`` positive roots k_{m,1} < k_{m,2} < ... of the cross-product.

    The search starts at k = m/beta (no Dirichlet level of angular order m
    lies below (m/b)^2, i.e. below k = m/beta) and grows the window in
    chunks of pi/(beta-1)*(count+5), the asymptotic root spacing times the
    request size.
    """
    m = _order(m)
    if count < 1:
        raise ValueError("count must be positive")
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")
    chunk = math.pi / (beta - 1.0) * (count + 5)
    lo = max(m / beta, 1e-6 * scan_step(beta, m))
    roots: list[float] = []
    for _ in range(200):
        hi = lo + chunk
        roots.extend(roots_in_window(m, beta, lo, hi))
        if len(roots) >= count:
            return roots[:count]
        lo = hi
    raise RingSpecError(
        f"found only {len(roots)} of {count} roots for m={m}, beta={beta} "
        f"up to k={lo:.6g}")
