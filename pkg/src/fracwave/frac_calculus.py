"""Fractional time derivatives.

Three evaluations of the Riemann-Liouville derivative of order ``s`` with
lower terminal 0:

* :func:`frac_deriv_gl` -- Grunwald-Letnikov sum over a uniformly sampled
  history; used by the time steppers.
* :func:`frac_deriv_rl` -- direct evaluation of
  ``1/Gamma(1-s) d/dt int_0^t p(tau) (t-tau)^-s dtau`` by product integration,
  kept as an independent oracle for the GL sum.
* :func:`ft_symbol` -- the frequency-domain multiplier ``(-i omega)^s``.

Fields are assumed identically zero for ``t < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

MAX_ORDER = 3.0


@dataclass(frozen=True)
class FracOrder:
    """A validated real fractional order in ``[0, 3]``."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise ValueError(f"fractional order must be finite, got {self.value!r}")
        if v < 0.0 or v > MAX_ORDER:
            raise ValueError(f"fractional order must lie in [0, {MAX_ORDER:g}], got {v!r}")
        object.__setattr__(self, "value", v)

    def __float__(self):
        return self.value


def as_order(s) -> FracOrder:
    return s if isinstance(s, FracOrder) else FracOrder(s)


@dataclass(frozen=True)
class GlWeights:
    order: FracOrder
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)


def gl_weights(s, n: int) -> GlWeights:
    """Grunwald-Letnikov weights ``w_0..w_n`` for order ``s``.

    ``w_0 = 1`` and ``w_k = w_{k-1} (k - 1 - s) / k``, i.e. the coefficients of
    ``(1 - z)^s``.
    """
    order = as_order(s)
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    k = np.arange(1, n + 1, dtype=float)
    w = np.empty(n + 1)
    w[0] = 1.0
    w[1:] = np.cumprod((k - 1.0 - order.value) / k)
    return GlWeights(order, w)


class HistoryBuffer:
    """Uniformly spaced snapshots ``p(t_0), p(t_0 + dt), ...`` of a field.

    ``window=None`` keeps the full history.  A finite window keeps only the
    newest ``window`` samples and marks the buffer as ``truncated`` once
    anything has been dropped, so callers can flag short-memory results.
    """

    def __init__(self, dt: float, window: int | None = None, shape=(), dtype=float):
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt!r}")
        if window is not None and window < 2:
            raise ValueError(f"truncation window must be >= 2, got {window}")
        self.dt = float(dt)
        self.window = window
        self.truncated = False
        self._shape = tuple(shape)
        self._dtype = np.dtype(dtype)
        self._data = np.zeros((16,) + self._shape, dtype=self._dtype)
        self._start = 0
        self._stop = 0

    def __len__(self):
        return self._stop - self._start

    @property
    def samples(self) -> np.ndarray:
        """Stored samples, oldest first (a view; do not mutate)."""
        return self._data[self._start:self._stop]

    def newest(self):
        if len(self) == 0:
            raise IndexError("history is empty")
        return self._data[self._stop - 1]

    def append(self, sample) -> None:
        sample = np.asarray(sample)
        if sample.shape != self._shape:
            raise ValueError(f"sample shape {sample.shape} does not match {self._shape}")
        if np.iscomplexobj(sample) and self._dtype.kind != "c":
            self._data = self._data.astype(complex)
            self._dtype = self._data.dtype
        if self._stop == len(self._data):
            live = self.samples
            cap = max(16, 2 * len(live))
            if self.window is not None:
                cap = max(cap, 2 * self.window)
            data = np.zeros((cap,) + self._shape, dtype=self._dtype)
            data[: len(live)] = live
            self._data, self._start, self._stop = data, 0, len(live)
        self._data[self._stop] = sample
        self._stop += 1
        if self.window is not None and len(self) > self.window:
            self._start = self._stop - self.window
            self.truncated = True

    def copy(self) -> "HistoryBuffer":
        other = HistoryBuffer(self.dt, self.window, self._shape, self._dtype)
        other._data = self._data.copy()
        other._start, other._stop = self._start, self._stop
        other.truncated = self.truncated
        return other

    @classmethod
    def from_samples(cls, samples, dt: float, window: int | None = None) -> "HistoryBuffer":
        arr = np.asarray(samples)
        buf = cls(dt, window=window, shape=arr.shape[1:], dtype=arr.dtype)
        for row in arr:
            buf.append(row)
        return buf


def frac_deriv_gl(history: HistoryBuffer, s, weights: GlWeights | None = None):
    """GL approximation of ``D^s p`` at the newest sample of ``history``.

    Returns ``dt^-s * sum_k w_k p(t - k dt)`` over the stored samples.  Pass a
    precomputed ``weights`` of at least ``len(history)`` entries to avoid
    recomputing them every call.
    """
    order = as_order(s)
    m = len(history)
    if m == 0:
        raise ValueError("history is empty")
    if not history.dt > 0:
        raise ValueError(f"dt must be positive, got {history.dt!r}")
    if order.value == 0.0:
        return history.newest().copy()
    if weights is None:
        weights = gl_weights(order, m - 1)
    elif weights.order.value != order.value or len(weights) < m:
        raise ValueError("precomputed weights do not match the order or history length")
    w = weights.weights[:m][::-1]
    samples = history.samples
    total = np.tensordot(w, samples, axes=(0, 0)) if samples.ndim > 1 else w @ samples
    return total * history.dt ** (-order.value)


def _product_integral(p: Callable, t: float, s: float, n: int) -> float:
    # int_0^t p(tau) (t - tau)^-s dtau with p piecewise linear on n intervals;
    # exact for the interpolant.
    tau = np.linspace(0.0, t, n + 1)
    pv = np.broadcast_to(np.asarray(p(tau), dtype=float), tau.shape)
    d = tau[1] - tau[0]
    a = t - tau[1:]
    b = t - tau[:-1]
    a = np.maximum(a, 0.0)
    i0 = (b ** (1 - s) - a ** (1 - s)) / (1 - s)
    i1 = (b ** (2 - s) - a ** (2 - s)) / (2 - s)
    # on [a, b] in u = t - tau: (tau_{j+1} - tau) = u - a, (tau - tau_j) = b - u
    left = (i1 - a * i0) / d
    right = (b * i0 - i1) / d
    return float(pv[:-1] @ left + pv[1:] @ right)


def frac_deriv_rl(p: Callable, t: float, s, n: int = 4000, rel_step: float = 1e-4) -> float:
    """Riemann-Liouville derivative of order ``0 < s < 1`` evaluated from its definition.

    ``p`` must accept a numpy array of times.  The inner memory integral uses
    product integration of the piecewise-linear interpolant of ``p`` against
    the weakly singular kernel; the outer time
    derivative is a central difference with step ``rel_step * t``, so ``p`` is
    evaluated on ``[0, t (1 + rel_step)]``.
    """
    s = float(as_order(s))
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    if not 0.0 < s < 1.0:
        raise ValueError(f"the quadrature oracle needs 0 < s < 1, got {s!r}")
    delta = rel_step * t
    hi = _product_integral(p, t + delta, s, n)
    lo = _product_integral(p, t - delta, s, n)
    return (hi - lo) / (2.0 * delta) / math.gamma(1.0 - s)


def rl_power(beta: float, s: float, t):
    """Analytic RL derivative of ``t^beta``: ``Gamma(beta+1)/Gamma(beta+1-s) t^(beta-s)``."""
    t = np.asarray(t, dtype=float)
    denom_arg = beta + 1.0 - s
    if denom_arg <= 0 and float(denom_arg).is_integer():
        return np.zeros_like(t)
    return math.gamma(beta + 1.0) / math.gamma(denom_arg) * t ** (beta - s)


def ft_symbol(s, omega: float) -> complex:
    """Fourier multiplier ``(-i omega)^s`` on the principal branch, for ``omega > 0``.

    Negative frequencies follow by conjugate symmetry at the call site.
    """
    s = float(as_order(s))
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    return complex(omega ** s * np.exp(-0.5j * math.pi * s))
