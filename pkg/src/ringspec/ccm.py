"""Conformal collocation on the mixed-boundary rectangle grid.

The ring problem ``-Delta psi = E psi`` becomes ``-(1/Sigma) Delta psi = E psi``
on the rectangle.  On the product grid (Dirichlet LSF nodes in x, periodic
LSF nodes in y) the operator is ``O = -D^{-1} Lap`` with ``D = diag(Sigma)``
and ``Lap = c_x (x) I + I (x) c_y``.  ``O`` itself is not symmetric; the
solver diagonalizes ``D^{-1/2} (-Lap) D^{-1/2}``, which is similar to it.

The 1-D blocks depend only on (N, L) and are cached on disk.
"""

from __future__ import annotations

import logging
import math
import os
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .conformal import PowerSeriesMap, map_point, sigma
from .errors import StateError
from .linalg import sym_eig
from .lsf import DIRICHLET, PERIODIC, LsfBasis, second_derivative_matrix

log = logging.getLogger(__name__)

__all__ = [
    "CACHE_ENV",
    "BlockCache",
    "CcmConfig",
    "CcmResult",
    "Assembly",
    "balanced_nx",
    "flatten",
    "unflatten",
    "grid_nodes",
    "assemble",
    "solve",
    "sample_wavefunction",
    "weighted_norm",
    "write_block",
    "read_block",
]

CACHE_ENV = "RINGSPEC_CACHE_DIR"
MAGIC = b"LSFD2\0"
_KIND_CODE = {PERIODIC: 1, DIRICHLET: 2}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}
_HEADER = struct.Struct("<6sBId")


def write_block(path, basis: LsfBasis, c: np.ndarray) -> None:
    """Write a derivative block atomically (temp file + rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = _HEADER.pack(MAGIC, _KIND_CODE[basis.kind], basis.n, basis.half_width)
    payload += np.ascontiguousarray(c, dtype="<f8").tobytes()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_block(path) -> tuple[LsfBasis, np.ndarray]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, code, n, half = _HEADER.unpack_from(data)
    if magic != MAGIC or code not in _CODE_KIND:
        raise ValueError(f"{path}: not a derivative block file")
    basis = LsfBasis(_CODE_KIND[code], n, half)
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size != basis.size**2:
        raise ValueError(f"{path}: expected {basis.size**2} entries, found {body.size}")
    return basis, body.reshape(basis.size, basis.size).astype(float)


class BlockCache:
    """Directory of second-derivative blocks keyed by (kind, N, L)."""

    def __init__(self, directory=None):
        if directory is None:
            directory = os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "ringspec"
        self.directory = Path(directory)

    def path(self, basis: LsfBasis) -> Path:
        return self.directory / f"lsf2_{basis.kind}_{basis.n}_{basis.half_width:.12e}.bin"

    def get(self, basis: LsfBasis) -> tuple[np.ndarray, bool]:
        """Return ``(matrix, hit)``; builds and stores the block on a miss."""
        p = self.path(basis)
        if p.exists():
            try:
                stored, c = read_block(p)
                if stored == basis:
                    return c, True
            except ValueError as exc:
                log.warning("ignoring unreadable cache file %s: %s", p, exc)
        c = second_derivative_matrix(basis)
        try:
            write_block(p, basis, c)
        except OSError as exc:
            log.warning("could not write cache file %s: %s", p, exc)
        return c, False


@dataclass(frozen=True)
class CcmConfig:
    nx: int
    ny: int
    map: PowerSeriesMap

    def __post_init__(self):
        for name in ("nx", "ny"):
            v = getattr(self, name)
            if int(v) != v or v < 2 or v % 2:
                raise ValueError(f"{name} must be an even integer >= 2, got {v}")

    @property
    def dim(self) -> int:
        return (self.nx - 1) * (self.ny + 1)

    @property
    def x_basis(self) -> LsfBasis:
        return LsfBasis(DIRICHLET, self.nx, self.map.lx)

    @property
    def y_basis(self) -> LsfBasis:
        return LsfBasis(PERIODIC, self.ny, math.pi)


def balanced_nx(lx: float, ny: int) -> int:
    """Even N_x giving (about) equal spacing in both directions."""
    if ny < 2:
        raise ValueError("ny must be at least 2")
    v = lx / math.pi * (ny + 1)
    return max(2, 2 * int(math.floor(v / 2 + 0.5)))


def flatten(K: int, nx: int, ny: int) -> tuple[int, int]:
    """Grid indices (k, k') of the 1-based flat index K.

    ``k = K - (nx-1) [K/(nx-1+eps)] - nx/2``, ``k' = -ny/2 + [K/(nx-1+eps)]``;
    with eps -> 0+ the integer part is ``(K-1) // (nx-1)``.
    """
    dim = (nx - 1) * (ny + 1)
    if not 1 <= K <= dim:
        raise IndexError(f"K={K} outside [1, {dim}]")
    q = (K - 1) // (nx - 1)
    return K - (nx - 1) * q - nx // 2, q - ny // 2


def unflatten(k: int, kp: int, nx: int, ny: int) -> int:
    """1-based flat index K of the grid pair (k, k'); inverse of flatten."""
    if not (-nx // 2 + 1 <= k <= nx // 2 - 1 and -ny // 2 <= kp <= ny // 2):
        raise IndexError(f"({k}, {kp}) outside the grid")
    return (kp + ny // 2) * (nx - 1) + k + nx // 2


def grid_nodes(config: CcmConfig) -> tuple[np.ndarray, np.ndarray]:
    """x and y coordinates of every flat index (x varies fastest)."""
    xs = config.x_basis.nodes
    ys = config.y_basis.nodes
    return np.tile(xs, len(ys)), np.repeat(ys, len(xs))


def _kron_sum(cx: np.ndarray, cy: np.ndarray) -> np.ndarray:
    qx, py = cx.shape[0], cy.shape[0]
    lap = np.zeros((py, qx, py, qx))
    ip = np.arange(py)
    iq = np.arange(qx)
    lap[ip, :, ip, :] += cx
    lap[:, iq, :, iq] += cy
    return lap.reshape(py * qx, py * qx)


@dataclass(frozen=True)
class Assembly:
    laplacian: np.ndarray
    inv_density: np.ndarray
    cache_hits: tuple = ()


def _blocks(config: CcmConfig, cache: Optional[BlockCache]):
    if cache is None:
        return (second_derivative_matrix(config.x_basis),
                second_derivative_matrix(config.y_basis), ())
    cx, hx = cache.get(config.x_basis)
    cy, hy = cache.get(config.y_basis)
    return cx, cy, (hx, hy)


def _inv_density(config: CcmConfig) -> np.ndarray:
    x, y = grid_nodes(config)
    return 1.0 / sigma(config.map, x, y)


def assemble(config: CcmConfig, cache: Optional[BlockCache] = None) -> Assembly:
    """Discrete Laplacian on the grid and ``1/Sigma`` at every node.

    ``laplacian`` is ``c_x (x) I + I (x) c_y`` (negative definite); the
    collocation operator is ``-diag(inv_density) @ laplacian``.
    """
    inv = _inv_density(config)
    cx, cy, hits = _blocks(config, cache)
    return Assembly(_kron_sum(cx, cy), inv, hits)


@dataclass(frozen=True)
class CcmResult:
    energies: np.ndarray
    config: CcmConfig
    vectors: Optional[np.ndarray] = None
    cache_hits: tuple = field(default=())

    def __len__(self) -> int:
        return len(self.energies)


def solve(config: CcmConfig, n_states: Optional[int] = None, want_vectors: bool = False,
          cache: Optional[BlockCache] = None) -> CcmResult:
    """Lowest ``n_states`` energies (divided by C^2) and optional eigenfunctions.

    Eigenfunctions are returned on the grid (columns, flat index order),
    normalized so that ``hx * hy * sum(Sigma * psi^2) = 1``.
    """
    dim = config.dim
    if n_states is None:
        n_states = dim
    if not 1 <= n_states <= dim:
        raise ValueError(f"n_states must be in [1, {dim}]")
    inv = _inv_density(config)
    cx, cy, hits = _blocks(config, cache)
    h = _kron_sum(cx, cy)
    r = np.sqrt(inv)
    h *= r[:, None]
    h *= r[None, :]
    np.negative(h, out=h)
    dec = sym_eig(h, want_vectors=want_vectors, count=n_states, overwrite=True)
    del h
    energies = dec.values / config.map.c**2
    vecs = None
    if want_vectors:
        cell = config.x_basis.spacing * config.y_basis.spacing
        vecs = dec.vectors * r[:, None] / math.sqrt(cell)
        pivot = np.argmax(np.abs(vecs), axis=0)
        vecs *= np.sign(vecs[pivot, np.arange(vecs.shape[1])])
    return CcmResult(energies=energies, config=config, vectors=vecs, cache_hits=hits)


def weighted_norm(result: CcmResult, state_index: int) -> float:
    """``hx * hy * sum(Sigma psi^2)``, the discrete L2 norm on the ring."""
    psi = _state(result, state_index)
    cfg = result.config
    cell = cfg.x_basis.spacing * cfg.y_basis.spacing
    x, y = grid_nodes(cfg)
    return float(cell * np.sum(sigma(cfg.map, x, y) * psi**2))


def _state(result: CcmResult, state_index: int) -> np.ndarray:
    if result.vectors is None:
        raise StateError("eigenvectors were not requested for this result")
    if not 0 <= state_index < result.vectors.shape[1]:
        raise IndexError(f"state {state_index} not available")
    return result.vectors[:, state_index]


def sample_wavefunction(result: CcmResult, state_index: int) -> np.ndarray:
    """Rows ``(u, v, psi)`` at the grid nodes mapped onto the ring (C applied)."""
    psi = _state(result, state_index)
    x, y = grid_nodes(result.config)
    u, v = map_point(result.config.map, x, y, scaled=True)
    return np.column_stack([u, v, psi])
