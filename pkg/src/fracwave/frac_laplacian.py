"""Discrete spatial operators on uniform 1D grids.

``A`` is the negative second-difference matrix (SPD on Dirichlet grids, PSD
with a single zero mode on periodic ones).  Its fractional powers
``A^r = Q diag(lambda^r) Q^T`` realise the magnitude of a spatial fractional
derivative, ``|nabla^y u| = A^{y/2} u``.  On periodic grids the same operator
is diagonalised by the DFT, which gives an independent FFT route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .frac_calculus import as_order

DIRICHLET = "dirichlet"
PERIODIC = "periodic"
CLIP_REL = 1e-10


@dataclass(frozen=True)
class Grid1D:
    n: int
    h: float
    boundary: str = PERIODIC

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"grid needs n >= 3 points, got {self.n!r}")
        if not self.h > 0:
            raise ValueError(f"grid spacing must be positive, got {self.h!r}")
        if self.boundary not in (DIRICHLET, PERIODIC):
            raise ValueError(f"boundary must be 'dirichlet' or 'periodic', got {self.boundary!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "h", float(self.h))

    @property
    def periodic(self) -> bool:
        return self.boundary == PERIODIC

    @property
    def length(self) -> float:
        return self.n * self.h if self.periodic else (self.n - 1) * self.h

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    def wavenumbers(self) -> np.ndarray:
        """Signed exact symbol of the centred stencil, ``2 sin(pi m / n) / h``, in DFT order.

        ``|kappa_m|^2`` is the eigenvalue of ``A`` for Fourier mode ``m``.
        """
        m = np.fft.fftfreq(self.n) * self.n
        return 2.0 * np.sin(np.pi * m / self.n) / self.h


@dataclass(frozen=True, eq=False)
class SpdOperator:
    """Symmetric (semi)definite matrix with a cached eigendecomposition."""

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, a) -> "SpdOperator":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        scale = max(np.abs(a).max(), np.finfo(float).tiny)
        if np.abs(a - a.T).max() > 1e-12 * scale:
            raise ValueError("matrix is not symmetric")
        lam, q = np.linalg.eigh(a)
        if lam.min() < -1e-10 * max(lam.max(), 0.0):
            raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {lam.min():g})")
        a = a.copy()
        for arr in (a, lam, q):
            arr.setflags(write=False)
        return cls(a, lam, q)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _clip_mask(self) -> np.ndarray:
        return self.eigenvalues <= CLIP_REL * self.eigenvalues.max()

    def powered_eigenvalues(self, r) -> np.ndarray:
        r = float(as_order(r))
        out = np.zeros_like(self.eigenvalues)
        keep = ~self._clip_mask
        out[keep] = self.eigenvalues[keep] ** r
        return out


def build_laplacian(grid: Grid1D) -> SpdOperator:
    """``A = -nabla_h^2``: stencil ``[-1, 2, -1] / h^2``, wrapped or clamped."""
    n = grid.n
    a = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    if grid.periodic:
        a[0, -1] = a[-1, 0] = -1.0
    return SpdOperator.from_matrix(a / grid.h**2)


def _check_power(r):
    r = float(r)
    if r < 0:
        raise ValueError(f"fractional power must be non-negative, got {r!r}")
    return r


def frac_power_apply(op: SpdOperator, r, u) -> np.ndarray:
    """``A^r u`` through the eigenbasis; zero modes are mapped to zero."""
    r = _check_power(r)
    u = np.asarray(u)
    if u.shape[0] != op.n:
        raise ValueError(f"field length {u.shape[0]} does not match operator size {op.n}")
    if r == 0.0 and not op._clip_mask.any():
        return u.copy()
    q = op.eigenvectors
    lam_r = op.powered_eigenvalues(r)
    if u.ndim > 1:
        lam_r = lam_r.reshape((-1,) + (1,) * (u.ndim - 1))
    return q @ (lam_r * (q.T @ u))


def frac_power_matrix(op: SpdOperator, r) -> np.ndarray:
    """Dense ``A^r``; symmetric PSD by construction."""
    r = _check_power(r)
    q = op.eigenvectors
    m = (q * op.powered_eigenvalues(r)) @ q.T
    return 0.5 * (m + m.T)


def apply_symbol(u, symbol: np.ndarray) -> np.ndarray:
    """Multiply the DFT of ``u`` by ``symbol`` (DFT order) and transform back."""
    u = np.asarray(u)
    out = np.fft.ifft(symbol * np.fft.fft(u))
    if np.isrealobj(u) and _is_hermitian(symbol):
        return out.real
    return out


def _is_hermitian(symbol: np.ndarray) -> bool:
    mirrored = symbol[(-np.arange(len(symbol))) % len(symbol)]
    return np.allclose(symbol, np.conj(mirrored), rtol=1e-12, atol=0.0)


def magnitude_symbol(grid: Grid1D, y) -> np.ndarray:
    """``|kappa_m|^y`` with the zero mode clipped to zero."""
    y = float(as_order(y))
    kappa = np.abs(grid.wavenumbers())
    keep = kappa**2 > CLIP_REL * (kappa**2).max()
    out = np.zeros_like(kappa)
    out[keep] = kappa[keep] ** y
    return out


def spectral_frac_laplacian(u, y, grid: Grid1D) -> np.ndarray:
    """FFT route to ``A^{y/2} u`` on a periodic grid."""
    if not grid.periodic:
        raise ValueError("the spectral fractional Laplacian needs a periodic grid")
    u = np.asarray(u)
    if u.shape != (grid.n,):
        raise ValueError(f"field length {u.shape} does not match grid size {grid.n}")
    return apply_symbol(u, magnitude_symbol(grid, y))


@dataclass(frozen=True, eq=False)
class GradientOperator:
    matrix: np.ndarray

    def skew_residual(self) -> float:
        return float(np.abs(self.matrix + self.matrix.T).max())


def build_gradient(grid: Grid1D) -> GradientOperator:
    """Central-difference first derivative; one-sided rows at Dirichlet ends."""
    n, h = grid.n, grid.h
    b = (np.eye(n, k=1) - np.eye(n, k=-1)) / (2.0 * h)
    if grid.periodic:
        b[0, -1] = -1.0 / (2.0 * h)
        b[-1, 0] = 1.0 / (2.0 * h)
    else:
        b[0, :2] = [-1.0 / h, 1.0 / h]
        b[-1, -2:] = [-1.0 / h, 1.0 / h]
    return GradientOperator(b)
