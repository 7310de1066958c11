"""Source time signatures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

GAUSSIAN_SINE = "gaussian-sine"
GAUSSIAN_BUMP = "gaussian-bump"
# Gaussian envelope delay in units of its standard deviation; keeps s(0) ~ 1e-8.
DELAY_SIGMAS = 6.0


@dataclass(frozen=True)
class PulseSpec:
    """A Gaussian-modulated sinusoid or Gaussian bump.

    ``bandwidth`` is the fractional full width at half maximum of the spectrum
    of the modulated sinusoid, so ``[f0(1 - b/2), f0(1 + b/2)]`` sits above half
    of the spectral peak.
    """

    f0: float
    bandwidth: float = 1.0
    amplitude: float = 1.0
    kind: str = GAUSSIAN_SINE

    def __post_init__(self):
        if not self.f0 > 0:
            raise ValueError(f"pulse centre frequency must be positive, got {self.f0!r}")
        if not 0 < self.bandwidth < 2:
            raise ValueError(f"fractional bandwidth must lie in (0, 2), got {self.bandwidth!r}")
        if self.kind not in (GAUSSIAN_SINE, GAUSSIAN_BUMP):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if not math.isfinite(self.amplitude):
            raise ValueError("pulse amplitude must be finite")

    @property
    def sigma_f(self) -> float:
        return self.bandwidth * self.f0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))

    @property
    def sigma_t(self) -> float:
        return 1.0 / (2.0 * math.pi * self.sigma_f)

    @property
    def delay(self) -> float:
        return DELAY_SIGMAS * self.sigma_t

    @property
    def f_max(self) -> float:
        """Highest frequency the grid and time step must resolve."""
        return self.f0 * (1.0 + self.bandwidth)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tau = t - self.delay
        env = self.amplitude * np.exp(-0.5 * (tau / self.sigma_t) ** 2)
        if self.kind == GAUSSIAN_BUMP:
            out = env
        else:
            out = env * np.cos(2.0 * math.pi * self.f0 * tau)
        return np.where(t < 0, 0.0, out)

    def derivative(self, t):
        """Exact time derivative of :meth:`__call__`."""
        t = np.asarray(t, dtype=float)
        tau = t - self.delay
        env = self.amplitude * np.exp(-0.5 * (tau / self.sigma_t) ** 2)
        denv = -tau / self.sigma_t**2 * env
        if self.kind == GAUSSIAN_BUMP:
            out = denv
        else:
            w = 2.0 * math.pi * self.f0
            out = denv * np.cos(w * tau) - w * env * np.sin(w * tau)
        return np.where(t < 0, 0.0, out)


def check_resolution(spec: PulseSpec, dt: float, h: float | None = None, c: float | None = None) -> None:
    """Raise if ``dt`` (or the grid, when ``h`` and ``c`` are given) under-resolves the pulse."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    steps = 1.0 / (spec.f_max * dt)
    if steps < 10.0:
        raise ValueError(
            f"time step too coarse: {steps:.3g} steps per period at f0*(1+b)={spec.f_max:.4g} Hz (need >= 10)"
        )
    if h is not None and c is not None:
        ppw = c / (spec.f_max * h)
        if ppw < 8.0:
            raise ValueError(
                f"grid too coarse: {ppw:.3g} points per wavelength at f0*(1+b)={spec.f_max:.4g} Hz (need >= 8)"
            )


def make_pulse(spec: PulseSpec, dt: float, duration: float, h: float | None = None,
               c: float | None = None, derivative: bool = False):
    """Sample ``spec`` (or its derivative) at ``t = 0, dt, ..., <= duration``; zero before ``t = 0``."""
    check_resolution(spec, dt, h, c)
    if not duration > 0:
        raise ValueError(f"duration must be positive, got {duration!r}")
    n = int(math.floor(duration / dt + 1e-9)) + 1
    t = np.arange(n) * dt
    return spec.derivative(t) if derivative else spec(t)


def analytic_signal(x, pad: int = 2) -> np.ndarray:
    """Positive-frequency part of a real series under the ``exp(-i w t)`` convention.

    This is the complex conjugate of the usual analytic signal: the real part
    is ``x`` and every component oscillates as ``exp(-i w t)`` with ``w > 0``.
    The series is zero-padded to ``pad`` times its length first so the
    transform's periodic wrap does not fold the tail back onto the start.
    """
    x = np.asarray(x, dtype=float)
    return np.conj(hilbert(x, N=pad * len(x))[: len(x)])
