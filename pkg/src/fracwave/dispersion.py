"""Plane-wave dispersion analysis and power-law fitting.

With ``p = exp(i(kx - wt))`` the linear models reduce to scalar equations in
``k`` at fixed real ``w > 0``:

* lossless: ``k = w/c``
* temporal (real and complex; the real form is analysed through its complex
  counterpart): ``k^2 = w^2/c^2 - i^y coef (-iw)^(1+y)``, closed form
* spatial (real and complex): ``k^2 = w^2/c^2 + i coef w k^y``, solved by
  Newton from the lossless root
* structural: ``k = (w/c) / sqrt(1 - i eta)``

``coef`` is :func:`fracwave.wave_models.damping_coefficient`.  The returned
root is the forward branch (``Re k > 0``), whose imaginary part is the
amplitude attenuation in nepers per metre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import csvio
from .errors import ConvergenceError, FitError
from .frac_calculus import ft_symbol
from .wave_models import (
    MediumParams,
    ModelKind,
    SPATIAL,
    TEMPORAL,
    WaveModel,
    complex_prefactor,
    damping_coefficient,
)

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
MIN_FIT_POINTS = 5
MIN_FIT_SPAN = 4.0


@dataclass(frozen=True)
class DispersionPoint:
    omega: float
    k: complex

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        object.__setattr__(self, "k", complex(self.k))

    @property
    def alpha(self) -> float:
        return self.k.imag

    @property
    def phase_speed(self) -> float:
        return self.omega / self.k.real


@dataclass(frozen=True)
class PowerLawFit:
    """``alpha ~ alpha0_hat * omega**y_hat`` with ``r2`` measured in log-log space."""

    alpha0_hat: float
    y_hat: float
    r2: float
    n_points: int

    def __call__(self, omega):
        return self.alpha0_hat * np.asarray(omega, dtype=float) ** self.y_hat


def _newton_spatial(omega: float, c: float, coef: float, y: float,
                    tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER) -> complex:
    k = complex(omega / c)
    iterates = [k]
    g = 1j * coef * omega
    for _ in range(max_iter):
        f = k * k - (omega / c) ** 2 - g * k**y
        df = 2.0 * k - g * y * k ** (y - 1.0)
        step = f / df
        k -= step
        iterates.append(k)
        if abs(step) <= tol * abs(k):
            return k
    raise ConvergenceError(
        f"Newton did not converge for omega={omega:g} within {max_iter} iterations", iterates
    )


def wavenumber(model: WaveModel, medium: MediumParams, omega: float) -> complex:
    """Forward-branch complex wavenumber at angular frequency ``omega``."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    c, y = medium.c, medium.y
    k0 = omega / c
    kind = model.kind
    coef = damping_coefficient(model, medium)
    if kind is ModelKind.LOSSLESS or (coef == 0 and kind is not ModelKind.STRUCTURAL):
        k = complex(k0)
    elif kind in TEMPORAL:
        k = np.sqrt(k0**2 - complex_prefactor(y) * coef * ft_symbol(1.0 + y, omega))
    elif kind in SPATIAL:
        k = _newton_spatial(omega, c, coef, y)
    else:
        k = k0 / np.sqrt(1.0 - 1j * model.eta)
    k = complex(k)
    if k.real < 0:
        k = -k
    return k


def dispersion_relation(model: WaveModel, medium: MediumParams, omega: float) -> DispersionPoint:
    return DispersionPoint(float(omega), wavenumber(model, medium, omega))


def attenuation_curve(model: WaveModel, medium: MediumParams, omegas) -> list[DispersionPoint]:
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1:
        raise ValueError("omegas must be a 1D sequence")
    if np.any(omegas <= 0):
        raise ValueError("omegas must be positive")
    if np.any(np.diff(omegas) < 0):
        raise ValueError("omegas must be sorted ascending")
    return [dispersion_relation(model, medium, w) for w in omegas]


def log_band(lo: float, hi: float, n: int = 50) -> np.ndarray:
    """``n`` log-spaced frequencies from ``lo`` to ``hi`` inclusive."""
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got {lo!r}, {hi!r}")
    return np.geomspace(lo, hi, n)


def _as_pairs(points) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(points, tuple) and len(points) == 2 and np.ndim(points[0]) == 1:
        w, a = points
    else:
        pts = list(points)
        if pts and isinstance(pts[0], DispersionPoint):
            w = [p.omega for p in pts]
            a = [p.alpha for p in pts]
        else:
            arr = np.asarray(pts, dtype=float).reshape(-1, 2) if pts else np.empty((0, 2))
            w, a = arr[:, 0], arr[:, 1]
    return np.asarray(w, dtype=float), np.asarray(a, dtype=float)


def fit_power_law(points) -> PowerLawFit:
    """Ordinary least squares of ``ln alpha`` on ``ln omega``.

    ``points`` is a sequence of :class:`DispersionPoint`, of ``(omega, alpha)``
    pairs, or a tuple ``(omegas, alphas)`` of arrays.
    """
    w, a = _as_pairs(points)
    if len(w) < MIN_FIT_POINTS:
        raise FitError(f"power-law fit needs at least {MIN_FIT_POINTS} points, got {len(w)}")
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(a))):
        raise FitError("power-law fit got non-finite data")
    if np.any(w <= 0):
        raise FitError("power-law fit needs positive frequencies")
    if np.any(a <= 0):
        raise FitError(f"nonpositive alpha in power-law fit (min {a.min():.3g})")
    if w.max() / w.min() < MIN_FIT_SPAN:
        raise FitError(f"frequency span {w.max() / w.min():.3g}x is below {MIN_FIT_SPAN:g}x")
    lw, la = np.log(w), np.log(a)
    design = np.column_stack([lw, np.ones_like(lw)])
    (slope, intercept), *_ = np.linalg.lstsq(design, la, rcond=None)
    resid = la - (slope * lw + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((la - la.mean()) ** 2).sum())
    if ss_tot > 1e-300:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res <= 1e-24 * max(1.0, float(la @ la)) else 0.0
    return PowerLawFit(float(math.exp(intercept)), float(slope), float(min(max(r2, 0.0), 1.0)), len(w))


def decay_amplitude(e0: float, alpha: float, x: float) -> float:
    """``E0 exp(-alpha x)``."""
    if x < 0:
        raise ValueError(f"distance must be non-negative, got {x!r}")
    return e0 * math.exp(-alpha * x)


def hausdorff_dimension(n_copies: float, scale: float) -> float:
    """``ln N / ln s`` for ``N`` self-similar copies at scale ``1/s``."""
    if n_copies < 1:
        raise ValueError(f"copy count must be >= 1, got {n_copies!r}")
    if not scale > 1:
        raise ValueError(f"scale factor must exceed 1, got {scale!r}")
    return math.log(n_copies) / math.log(scale)


def loss_per_wavelength(point: DispersionPoint) -> float:
    """Nepers lost over one wavelength, ``alpha * 2 pi / Re k``."""
    return point.alpha * 2.0 * math.pi / point.k.real


DISPERSION_COLUMNS = ("omega", "k_re", "k_im", "alpha", "phase_speed")


def dispersion_rows(points: Sequence[DispersionPoint]) -> list[tuple]:
    return [(p.omega, p.k.real, p.k.imag, p.alpha, p.phase_speed) for p in points]


def fit_footer(fit: PowerLawFit | None, error: str | None = None) -> list[tuple[str, object]]:
    if fit is None:
        return [("fit_error", error or "not fitted")]
    return [("alpha0_hat", fit.alpha0_hat), ("y_hat", fit.y_hat), ("r2", fit.r2), ("fit_points", fit.n_points)]


def write_dispersion_csv(path, points: Iterable[DispersionPoint], fit: PowerLawFit | None = None,
                         meta=None, fit_error: str | None = None):
    points = list(points)
    return csvio.write_csv(path, DISPERSION_COLUMNS, dispersion_rows(points), meta, fit_footer(fit, fit_error))
