"""Burgers equation with standard, fractional and frequency-independent damping.

All variants share the conservative form

    p_t + (p^2 / 2)_x + R[p] = 0

on a periodic grid, advanced by Heun's method (SSP-RK2) with a local
Lax-Friedrichs flux on limited (MUSCL) face states.  The damping ``R`` per variant:

==============  ================================================================
standard        ``-eps nabla^2 p`` with ``eps = 2 a0`` (stencil Laplacian)
frac_real       ``2 a0 | |p|^(2-g) A^(g/2) p |``  (pointwise absolute value)
frac_complex    ``i^(-3g) 2 a0 |p|^(2-g) nabla^g p`` with ``nabla^g <-> (-i|kappa|)^g``
gamma0          ``2 a0 p^2``
==============  ================================================================

As in :mod:`fracwave.wave_models`, ``i^(-3g)`` is ``exp(i pi g / 2)``, so the
complex variant's linear symbol is ``|kappa|^g``: at ``g = 2`` it is the
stencil eigenvalue itself and the variant coincides with ``standard``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import csvio
from .errors import FitError, StabilityError
from .frac_calculus import FracOrder
from .frac_laplacian import Grid1D, apply_symbol, magnitude_symbol
from .wave_models import complex_spatial_symbol


class BurgersVariant(enum.Enum):
    STANDARD = "standard"
    FRAC_REAL = "frac_real"
    FRAC_COMPLEX = "frac_complex"
    GAMMA0 = "gamma0"


@dataclass(frozen=True)
class BurgersParams:
    alpha0: float
    gamma: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha0) and self.alpha0 >= 0):
            raise ValueError(f"alpha0 must be >= 0, got {self.alpha0!r}")
        g = FracOrder(self.gamma).value
        if g > 2.0:
            raise ValueError(f"gamma must lie in [0, 2], got {g!r}")
        object.__setattr__(self, "gamma", g)

    @property
    def epsilon(self) -> float:
        """Diffusivity of the standard equation, ``2 alpha0``."""
        return 2.0 * self.alpha0


@dataclass
class BurgersState:
    p: np.ndarray
    t: float = 0.0

    def imag_residue(self) -> float:
        scale = np.abs(self.p).max()
        return float(np.abs(self.p.imag).max() / scale) if scale > 0 else 0.0


def _variant(v) -> BurgersVariant:
    return v if isinstance(v, BurgersVariant) else BurgersVariant(str(v).lower())


def _check_grid(grid: Grid1D) -> None:
    if not grid.periodic:
        raise ValueError("Burgers integrators need a periodic grid")


def _laplacian(p: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(p, -1) - 2.0 * p + np.roll(p, 1)) / h**2


def _mc_slope(p: np.ndarray) -> np.ndarray:
    """Monotonised-central limited slope per cell (real and imaginary parts separately)."""
    if np.iscomplexobj(p):
        return _mc_slope(p.real) + 1j * _mc_slope(p.imag)
    fwd = np.roll(p, -1) - p
    bwd = p - np.roll(p, 1)
    cen = 0.5 * (fwd + bwd)
    same = np.sign(fwd) == np.sign(bwd)
    mag = np.minimum(np.minimum(2.0 * np.abs(fwd), 2.0 * np.abs(bwd)), np.abs(cen))
    return np.where(same, np.sign(cen) * mag, 0.0)


def _llf_divergence(p: np.ndarray, h: float) -> np.ndarray:
    """``(F_{i+1/2} - F_{i-1/2}) / h`` for ``f = p^2/2``.

    Local Lax-Friedrichs flux on MUSCL face states (MC limiter), so smooth
    fields see second-order numerical dissipation instead of ``|p| h / 2``.
    """
    slope = _mc_slope(p)
    left = p + 0.5 * slope
    right = np.roll(p - 0.5 * slope, -1)
    speed = np.maximum(np.abs(left), np.abs(right))
    flux = 0.25 * (left * left + right * right) - 0.5 * speed * (right - left)
    return (flux - np.roll(flux, 1)) / h


class BurgersSolver:
    """Explicit stepper bound to one parameter set, variant and periodic grid."""

    def __init__(self, params: BurgersParams, variant, grid: Grid1D):
        _check_grid(grid)
        self.params, self.variant, self.grid = params, _variant(variant), grid
        g = params.gamma
        self._symbol = None
        if self.variant is BurgersVariant.FRAC_REAL:
            self._symbol = magnitude_symbol(grid, g)
        elif self.variant is BurgersVariant.FRAC_COMPLEX:
            self._symbol = complex_spatial_symbol(grid, g)

    def damping(self, p: np.ndarray) -> np.ndarray:
        a0, g = self.params.alpha0, self.params.gamma
        v = self.variant
        if a0 == 0:
            return np.zeros_like(p)
        if v is BurgersVariant.STANDARD:
            return -self.params.epsilon * _laplacian(p, self.grid.h)
        if v is BurgersVariant.GAMMA0:
            return 2.0 * a0 * p * p
        weight = np.abs(p) ** (2.0 - g)
        term = weight * apply_symbol(p, self._symbol)
        if v is BurgersVariant.FRAC_REAL:
            return 2.0 * a0 * np.abs(term)
        return 2.0 * a0 * term

    def rhs(self, p: np.ndarray) -> np.ndarray:
        return -_llf_divergence(p, self.grid.h) - self.damping(p)

    def damping_rate(self, pmax: float) -> float:
        """Largest linearised damping rate for fields bounded by ``pmax``."""
        a0, g = self.params.alpha0, self.params.gamma
        kmax = 2.0 / self.grid.h
        v = self.variant
        if v is BurgersVariant.STANDARD:
            return self.params.epsilon * kmax**2
        if v is BurgersVariant.GAMMA0:
            return 4.0 * a0 * pmax
        return 2.0 * a0 * pmax ** (2.0 - g) * kmax**g

    def max_dt(self, p: np.ndarray, sigma: float = 0.5) -> float:
        """``min(sigma h / max|p|, 2 sigma / rate)``: advective and damping limits."""
        pmax = float(np.abs(p).max())
        limits = [math.inf]
        if pmax > 0:
            limits.append(sigma * self.grid.h / pmax)
        rate = self.damping_rate(pmax)
        if rate > 0:
            limits.append(2.0 * sigma / rate)
        return min(limits)

    def step(self, state: BurgersState, dt: float, check: bool = True) -> BurgersState:
        p = state.p
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt!r}")
        if check:
            limit = self.max_dt(p)
            if dt > limit * (1.0 + 1e-12):
                raise StabilityError(f"dt={dt:g} violates the explicit limit {limit:g}", [dt / limit])
        k1 = self.rhs(p)
        p1 = p + dt * k1
        k2 = self.rhs(p1)
        return BurgersState(p + 0.5 * dt * (k1 + k2), state.t + dt)


def step_burgers(state: BurgersState, params: BurgersParams, variant, grid: Grid1D, dt: float) -> BurgersState:
    """One Heun step; builds a throwaway :class:`BurgersSolver` (use the class in loops)."""
    return BurgersSolver(params, variant, grid).step(state, dt)


@dataclass
class BurgersRun:
    times: np.ndarray
    snapshots: np.ndarray  # (n_snapshots, n) complex
    dt: float

    def to_csv(self, path, grid: Grid1D, meta=None):
        rows = []
        x = grid.x
        for t, p in zip(self.times, self.snapshots):
            rows.extend((t, xi, pi.real, pi.imag) for xi, pi in zip(x, p))
        return csvio.write_csv(path, ("t", "x", "p_re", "p_im"), rows, meta)


def run_burgers(p0, params: BurgersParams, variant, grid: Grid1D, t_end: float,
                n_snapshots: int = 11, dt: float | None = None, sigma: float = 0.5) -> BurgersRun:
    """Integrate from ``p0`` to ``t_end`` and keep ``n_snapshots`` equally spaced snapshots.

    ``dt`` defaults to the explicit limit at ``t = 0`` (the limits do not
    tighten because no variant raises ``max|p|``), then shrinks so that the
    snapshot times fall on steps.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end!r}")
    if n_snapshots < 2:
        raise ValueError("need at least two snapshots")
    solver = BurgersSolver(params, variant, grid)
    p = np.asarray(p0, dtype=complex).copy()
    if p.shape != (grid.n,):
        raise ValueError("initial field must match the grid size")
    interval = t_end / (n_snapshots - 1)
    limit = solver.max_dt(p, sigma)
    dt_req = limit if dt is None else float(dt)
    per = max(1, int(math.ceil(interval / dt_req - 1e-9)))
    dt = interval / per
    state = BurgersState(p, 0.0)
    snaps = [p.copy()]
    for _ in range(n_snapshots - 1):
        for _ in range(per):
            state = solver.step(state, dt)
        snaps.append(state.p.copy())
    return BurgersRun(np.arange(n_snapshots) * interval, np.array(snaps), dt)


@dataclass(frozen=True)
class DecaySpectrum:
    modes: np.ndarray
    kappa: np.ndarray
    rates: np.ndarray

    def fit_exponent(self) -> tuple[float, float]:
        """OLS slope and intercept of ``ln rate`` on ``ln kappa``."""
        if np.any(self.rates <= 0):
            raise FitError("decay rates must be positive to fit an exponent")
        slope, intercept = np.polyfit(np.log(self.kappa), np.log(self.rates), 1)
        return float(slope), float(math.exp(intercept))


def burgers_decay_spectrum(snapshots, times, grid: Grid1D, modes=None, floor: float = 1e-10) -> DecaySpectrum:
    """Per-mode exponential decay rates from field snapshots.

    For each positive DFT mode ``m`` (all of them by default) fits
    ``ln |p_m(t)|`` by least squares over the snapshots and reports
    ``kappa_m = |2 sin(pi m / n) / h|`` and the rate ``-slope``.  Modes whose
    amplitude ever drops below ``floor`` times the largest initial non-mean
    amplitude are skipped.
    """
    snaps = np.asarray(snapshots)
    times = np.asarray(times, dtype=float)
    if snaps.ndim != 2 or snaps.shape[0] < 3:
        raise FitError("decay spectrum needs at least 3 snapshots")
    if snaps.shape != (len(times), grid.n):
        raise ValueError("snapshots must be (len(times), grid.n)")
    amp = np.abs(np.fft.fft(snaps, axis=1))
    if modes is None:
        modes = np.arange(1, grid.n // 2)
    modes = np.asarray(modes, dtype=int)
    ref = amp[0, 1:].max()
    kappa_all = np.abs(grid.wavenumbers())
    keep, rates = [], []
    for m in modes:
        a = amp[:, m]
        if ref == 0 or a.min() <= floor * ref:
            continue
        slope = np.polyfit(times, np.log(a), 1)[0]
        keep.append(m)
        rates.append(-slope)
    if len(keep) < 2:
        raise FitError(f"only {len(keep)} modes above the noise floor; need at least 2")
    keep = np.array(keep)
    return DecaySpectrum(keep, kappa_all[keep], np.array(rates))
