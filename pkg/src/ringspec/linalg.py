"""Dense eigensolvers, root bracketing and 1-D quadrature.

The eigensolvers delegate to LAPACK (``syevr`` / ``sygvd`` through SciPy);
everything here is a thin, validated layer so that callers never have to
deal with backend quirks such as non-exact symmetry or silent NaNs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import DegeneracyError

__all__ = [
    "EigenDecomposition",
    "as_symmetric",
    "sym_eig",
    "gen_sym_eig",
    "find_root_brackets",
    "refine_root",
    "gauss_legendre",
    "periodic_trapezoid",
    "integrate_1d",
]


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.values)


def as_symmetric(a, rtol: float = 1e-10) -> np.ndarray:
    """Return ``a`` as an exactly symmetric float array.

    The input may deviate from symmetry by rounding (``rtol`` relative to
    the largest entry); anything worse is rejected.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = float(np.max(np.abs(a))) or 1.0
    if np.max(np.abs(a - a.T)) > rtol * scale:
        raise ValueError("matrix is not symmetric")
    a += a.T
    a *= 0.5
    return a


def sym_eig(a, want_vectors: bool = False, count: Optional[int] = None,
            overwrite: bool = False) -> EigenDecomposition:
    """Eigenvalues (ascending) and optionally orthonormal eigenvectors.

    ``count`` restricts the computation to the ``count`` smallest pairs,
    which avoids back-transforming unused eigenvectors on large grids.
    With ``overwrite=True`` the (already symmetric, finite) input array is
    used as LAPACK workspace and is destroyed.
    """
    if overwrite and isinstance(a, np.ndarray) and a.dtype == np.float64:
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
    else:
        a = as_symmetric(a)
    n = a.shape[0]
    subset = None
    if count is not None:
        if not 1 <= count <= n:
            raise ValueError(f"count must be in [1, {n}], got {count}")
        if count < n:
            subset = (0, count - 1)
    if want_vectors:
        w, v = scipy.linalg.eigh(a, subset_by_index=subset, overwrite_a=True,
                                 check_finite=False)
        return EigenDecomposition(w, v)
    w = scipy.linalg.eigh(a, eigvals_only=True, subset_by_index=subset,
                          overwrite_a=True, check_finite=False)
    return EigenDecomposition(w)


def gen_sym_eig(a, b, want_vectors: bool = False) -> EigenDecomposition:
    """Solve ``a v = lam b v`` for symmetric ``a`` and SPD ``b``.

    The pencil is reduced with the Cholesky factor of ``b``; a failed
    factorization is reported as :class:`DegeneracyError` rather than
    regularized away.
    """
    a = as_symmetric(a)
    b = as_symmetric(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    try:
        low = np.linalg.cholesky(b)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError("b is not positive definite") from exc
    x = scipy.linalg.solve_triangular(low, a, lower=True)
    c = scipy.linalg.solve_triangular(low, x.T, lower=True)
    res = sym_eig(0.5 * (c + c.T), want_vectors=want_vectors)
    if not want_vectors:
        return res
    vecs = scipy.linalg.solve_triangular(low.T, res.vectors, lower=False)
    return EigenDecomposition(res.values, vecs)


def find_root_brackets(f: Callable, lo: float, hi: float, steps: int,
                       vectorized: bool = False) -> list[tuple[float, float]]:
    """Sign changes of ``f`` on a uniform scan of ``steps`` subintervals.

    Exact zeros on the scan grid produce a degenerate bracket ``(x, x)``.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if steps < 1:
        raise ValueError("steps must be positive")
    xs = np.linspace(lo, hi, steps + 1)
    if vectorized:
        fs = np.asarray(f(xs), dtype=float)
    else:
        fs = np.array([f(x) for x in xs], dtype=float)
    sg = np.sign(fs)
    out = []
    for i in range(steps):
        if sg[i] == 0.0:
            out.append((float(xs[i]), float(xs[i])))
        elif sg[i] * sg[i + 1] < 0:
            out.append((float(xs[i]), float(xs[i + 1])))
    if sg[-1] == 0.0:
        out.append((float(xs[-1]), float(xs[-1])))
    return out


def refine_root(f: Callable[[float], float], bracket: Sequence[float],
                tol: float = 1e-12) -> float:
    """Bisection until the bracket is narrower than ``tol``.

    Only the sign of ``f`` is used, so scaled surrogates with the same
    zero set (and infinite values of the right sign) are acceptable.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point Gauss-Legendre rule on [lo, hi]."""
    x, w = _leggauss(n)
    half = 0.5 * (hi - lo)
    return 0.5 * (hi + lo) + half * x, half * w


def periodic_trapezoid(n: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Equal-weight rule on the period [lo, hi) with ``n`` nodes."""
    h = (hi - lo) / n
    return lo + h * np.arange(n), np.full(n, h)


def integrate_1d(f: Callable, lo: float, hi: float, scheme: str = "gauss",
                 n: int = 64) -> float:
    """Fixed-order quadrature; ``f`` must accept a numpy array."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if scheme == "gauss":
        x, w = gauss_legendre(n, lo, hi)
    elif scheme == "periodic_trapezoid":
        x, w = periodic_trapezoid(n, lo, hi)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return float(np.dot(w, np.asarray(f(x), dtype=float)))
