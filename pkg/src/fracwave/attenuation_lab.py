"""Time-domain attenuation experiments.

A point source launches a broadband pulse along a periodic line.  Two probes
downstream record it.  Each trace is windowed around its envelope peak, both
are transformed, and

    alpha(w) = ln(|P1(w)| / |P2(w)|) / (x2 - x1)

is fitted by a power law and compared with the dispersion prediction.

Spectra use the ``exp(-i w t)`` convention, ``P(w) = sum p(t) exp(+i w t) dt``,
so the positive-frequency content of complex-domain traces lands on ``w > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal.windows import tukey

from . import csvio
from .dispersion import PowerLawFit, attenuation_curve, fit_power_law
from .errors import FitError, NumericalError
from .frac_laplacian import Grid1D
from .pulses import GAUSSIAN_BUMP, GAUSSIAN_SINE, PulseSpec, analytic_signal, make_pulse
from .wave_models import (
    DRIVEN_POINT,
    MediumParams,
    ProbeTraces,
    SourceSpec,
    WaveModel,
    simulate,
)

__all__ = [
    "GAUSSIAN_BUMP",
    "GAUSSIAN_SINE",
    "ExperimentResult",
    "LabSetup",
    "PulseSpec",
    "SweepRow",
    "envelope",
    "log_spectral_ratio",
    "make_pulse",
    "run_attenuation_experiment",
    "snr_mask",
    "sweep",
    "write_sweep_csv",
]

# Wavenumber cutoff for complex-domain runs, as a multiple of the highest
# resolved pulse wavenumber 2 pi f0 (1 + b) / c.
KCUT_FACTOR = 1.5


@dataclass(frozen=True)
class LabSetup:
    """Grid, geometry and processing choices shared by every experiment.

    Distances in metres, times in seconds.  ``dt=None`` asks
    :func:`fracwave.wave_models.stable_dt`.  ``band`` restricts the fit to an
    angular-frequency interval; ``None`` uses the pulse's half-maximum band
    ``2 pi f0 (1 -/+ b/2)``.  ``window_sigmas`` is the half-width of each
    probe window in units of the pulse envelope's standard deviation.
    """

    n: int = 1000
    h: float = 0.05
    dt: float | None = 0.025
    x_source: float = 5.0
    x1: float = 10.0
    x2: float = 25.0
    duration: float = 27.0
    pulse: PulseSpec = field(default_factory=lambda: PulseSpec(0.8, 1.3))
    band: tuple[float, float] | None = None
    snr_gate: float = 0.01
    window_sigmas: float = 10.0
    taper: float = 0.1
    kcut_factor: float | None = KCUT_FACTOR

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.n, self.h)

    def nominal_band(self) -> tuple[float, float]:
        if self.band is not None:
            return self.band
        f0, b = self.pulse.f0, self.pulse.bandwidth
        return 2.0 * math.pi * f0 * (1.0 - 0.5 * b), 2.0 * math.pi * f0 * (1.0 + 0.5 * b)


def envelope(trace) -> np.ndarray:
    """Magnitude of the one-sided signal; complex traces are taken as already one-sided."""
    trace = np.asarray(trace)
    if np.iscomplexobj(trace) and np.abs(trace.imag).max() > 0:
        return np.abs(trace)
    return np.abs(analytic_signal(trace.real))


def _window(n_t: int, centre: int, half: int, taper: float) -> tuple[np.ndarray, int, int]:
    lo, hi = max(centre - half, 0), min(centre + half + 1, n_t)
    w = np.zeros(n_t)
    # tukey's alpha is the total tapered fraction: ``taper`` on each side
    w[lo:hi] = tukey(hi - lo, alpha=2.0 * taper)
    return w, lo, hi


def spectrum(trace, dt: float, n_fft: int) -> tuple[np.ndarray, np.ndarray]:
    """``(omega, P)`` for ``omega > 0`` with ``P = sum p exp(+i w t) dt``."""
    p = np.fft.ifft(np.asarray(trace, dtype=complex), n_fft) * n_fft * dt
    omega = 2.0 * math.pi * np.fft.fftfreq(n_fft, dt)
    pos = omega > 0
    return omega[pos], p[pos]


def snr_mask(p1, p2, gate: float) -> np.ndarray:
    """Frequencies where both spectra reach ``gate`` times their own peak."""
    a1, a2 = np.abs(p1), np.abs(p2)
    return (a1 >= gate * a1.max()) & (a2 >= gate * a2.max()) & (a1 > 0) & (a2 > 0)


def log_spectral_ratio(p1, p2, dx: float) -> np.ndarray:
    """``ln(|P1| / |P2|) / dx``: attenuation from probe 1 to probe 2."""
    if dx == 0:
        raise ValueError("probe separation must be nonzero")
    return np.log(np.abs(p1) / np.abs(p2)) / dx


@dataclass
class ExperimentResult:
    model: str
    medium: MediumParams
    omega: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    alpha_measured: np.ndarray
    alpha_predicted: np.ndarray
    fit: PowerLawFit | None
    dt: float
    dx: float
    arrivals: tuple[float, float]
    window: dict
    fit_error: str | None = None

    @property
    def band(self) -> tuple[float, float]:
        return float(self.omega[0]), float(self.omega[-1])

    def relative_deviation(self) -> np.ndarray:
        return np.abs(self.alpha_measured - self.alpha_predicted) / np.abs(self.alpha_predicted)

    def middle_half(self) -> np.ndarray:
        lo, hi = self.band
        q = 0.25 * (hi - lo)
        return (self.omega >= lo + q) & (self.omega <= hi - q)

    def max_deviation(self) -> float:
        """Largest relative measured-vs-predicted deviation on the middle half of the band."""
        m = self.middle_half()
        if not m.any() or np.any(self.alpha_predicted[m] == 0):
            return math.nan
        return float(self.relative_deviation()[m].max())

    def metadata(self) -> list[tuple[str, object]]:
        med = self.medium
        items = [("model", self.model), ("c", med.c), ("alpha0", med.alpha0), ("y", med.y),
                 ("dt", self.dt), ("dx", self.dx), ("arrival1", self.arrivals[0]), ("arrival2", self.arrivals[1])]
        items += [(f"window_{k}", v) for k, v in self.window.items()]
        return items

    def footer(self) -> list[tuple[str, object]]:
        if self.fit is None:
            return [("fit_error", self.fit_error or "not fitted")]
        return [("alpha0_hat", self.fit.alpha0_hat), ("y_hat", self.fit.y_hat), ("r2", self.fit.r2),
                ("max_deviation_middle_half", self.max_deviation())]

    def to_csv(self, path, meta=None):
        rows = zip(self.omega, self.alpha_measured, self.alpha_predicted)
        head = list(meta or []) + self.metadata()
        return csvio.write_csv(path, ("omega", "alpha_measured", "alpha_predicted"), rows, head, self.footer())


def _index(x: float, grid: Grid1D, name: str) -> int:
    i = int(round(x / grid.h))
    if not 0 <= i < grid.n:
        raise ValueError(f"{name}={x!r} m lies outside the grid [0, {grid.length:g})")
    return i


def _check_geometry(grid: Grid1D, c: float, xs: float, x1: float, x2: float, duration: float) -> None:
    if not xs < x1 < x2:
        raise ValueError("need x_source < x1 < x2 (probes ordered along propagation)")
    length = grid.length
    if x2 >= length:
        raise ValueError("probe 2 lies outside the grid")
    # earliest energy that could reach a probe the long way round
    wrap = min(xs + (length - x2), (length - xs) + x1)
    if duration > wrap / c:
        raise ValueError(
            f"recording of {duration:g} s outlasts the wrap-around arrival at {wrap / c:g} s; enlarge the grid"
        )


def run_attenuation_experiment(model: WaveModel, medium: MediumParams, setup: LabSetup | None = None,
                               **overrides) -> ExperimentResult:
    """Measure ``alpha(omega)`` between two probes and fit a power law.

    Keyword ``overrides`` replace fields of ``setup`` (or of the default
    :class:`LabSetup`).
    """
    setup = setup or LabSetup()
    if overrides:
        setup = _replace(setup, **overrides)
    grid = setup.grid
    pulse = setup.pulse
    _check_geometry(grid, medium.c, setup.x_source, setup.x1, setup.x2, setup.duration)
    i_s = _index(setup.x_source, grid, "x_source")
    i1, i2 = _index(setup.x1, grid, "x1"), _index(setup.x2, grid, "x2")
    dx = (i2 - i1) * grid.h
    kcut = None
    if model.complex_domain and setup.kcut_factor is not None:
        kcut = setup.kcut_factor * 2.0 * math.pi * pulse.f_max / medium.c
    source = SourceSpec(DRIVEN_POINT, i_s, pulse=pulse, analytic=model.complex_domain)
    traces = simulate(model, medium, grid, source, setup.duration, [i1, i2], dt=setup.dt,
                      spatial_path="fft", kcut=kcut)
    return analyse_traces(traces, model, medium, setup, dx)


def analyse_traces(traces: ProbeTraces, model: WaveModel, medium: MediumParams, setup: LabSetup,
                   dx: float) -> ExperimentResult:
    dt = traces.dt
    values = traces.values
    if not np.all(np.isfinite(values)):
        raise NumericalError("probe traces contain non-finite values")
    n_t = values.shape[1]
    half = int(round(setup.window_sigmas * setup.pulse.sigma_t / dt))
    n_fft = 1 << int(math.ceil(math.log2(4 * n_t)))
    spectra, arrivals = [], []
    for v in values:
        env = envelope(v)
        k = int(np.argmax(env))
        w, _, _ = _window(n_t, k, half, setup.taper)
        omega, p = spectrum(v * w, dt, n_fft)
        spectra.append(p)
        arrivals.append(k * dt)
    p1, p2 = spectra
    lo, hi = setup.nominal_band()
    keep = snr_mask(p1, p2, setup.snr_gate) & (omega >= lo) & (omega <= hi)
    if not keep.any():
        raise NumericalError("empty SNR band: no frequency clears the gate on both probes")
    omega, p1, p2 = omega[keep], p1[keep], p2[keep]
    measured = log_spectral_ratio(p1, p2, dx)
    predicted = np.array([pt.alpha for pt in attenuation_curve(model, medium, omega)])
    fit, err = None, None
    try:
        fit = fit_power_law((omega, measured))
    except FitError as exc:
        err = str(exc)
    window = {"kind": "rectangular-cosine-taper", "taper_fraction": setup.taper,
              "half_width_s": half * dt, "snr_gate": setup.snr_gate}
    return ExperimentResult(model.name, medium, omega, p1, p2, measured, predicted, fit, dt, dx,
                            (arrivals[0], arrivals[1]), window, err)


def _replace(setup: LabSetup, **kw) -> LabSetup:
    from dataclasses import replace

    return replace(setup, **kw)


@dataclass(frozen=True)
class SweepRow:
    model: str
    y: float
    alpha0: float
    y_hat: float = math.nan
    alpha0_hat: float = math.nan
    r2: float = math.nan
    band_lo: float = math.nan
    band_hi: float = math.nan
    max_deviation: float = math.nan
    error: str = ""

    def as_tuple(self):
        return (self.model, self.y, self.alpha0, self.y_hat, self.alpha0_hat, self.r2,
                self.band_lo, self.band_hi, self.max_deviation, self.error)


SWEEP_COLUMNS = ("model", "y", "alpha0", "y_hat", "alpha0_hat", "r2", "band_lo", "band_hi",
                 "max_deviation", "error")


def _row(model: WaveModel, y: float, a0: float, setup: LabSetup, c: float) -> SweepRow:
    try:
        res = run_attenuation_experiment(model, MediumParams(c, a0, y), setup)
    except (NumericalError, ValueError) as exc:
        return SweepRow(model.name, y, a0, error=f"{type(exc).__name__}: {exc}")
    lo, hi = res.band
    if res.fit is None:
        return SweepRow(model.name, y, a0, band_lo=lo, band_hi=hi, max_deviation=res.max_deviation(),
                        error=f"FitError: {res.fit_error}")
    return SweepRow(model.name, y, a0, res.fit.y_hat, res.fit.alpha0_hat, res.fit.r2, lo, hi,
                    res.max_deviation())


def sweep(models: Sequence[WaveModel], ys: Sequence[float], alpha0s: Sequence[float],
          setup: LabSetup | None = None, c: float = 1.0) -> list[SweepRow]:
    """One experiment per (model, y, alpha0); failures are recorded in the row's ``error``."""
    setup = setup or LabSetup()
    return [_row(m, float(y), float(a0), setup, c) for m in models for y in ys for a0 in alpha0s]


def write_sweep_csv(path, rows: Sequence[SweepRow], meta=None):
    return csvio.write_csv(path, SWEEP_COLUMNS, [r.as_tuple() for r in rows], meta)
