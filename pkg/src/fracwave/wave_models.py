"""Time-domain integrators for the lossy wave models.

All models share one explicit three-level leapfrog for

    nabla^2 p = p_tt / c^2 + D[p]        (plus an optional point forcing)

with the damping ``D`` evaluated at the current level (lagged):

========================  ====================================================
lossless                  0
temporal_real             2 a0 / c^(1+2y) * d/dt | D_t^y p |   (pointwise abs)
temporal_complex          i^(-3y) 2 a0 / c^(1+2y) * D_t^(1+y) p   (one GL op)
spatial_real              2 a0 / c^(1+y) * d/dt (A^(y/2) p)
spatial_complex           i^(-3y) 2 a0 / c^(1+y) * d/dt (nabla^y p)
structural                no D; the Laplacian carries the factor (1 - i eta)
========================  ====================================================

Sign and branch conventions (plane waves ``exp(i(kx - wt))``, so ``d/dt -> -iw``):

* ``i^(-3y)`` is read as ``(i^-3)^y = i^y = exp(i pi y / 2)``, the inverse of
  the phase of ``(-i)^y``.  On positive frequencies it turns
  ``(-iw)^(1+y)`` into ``-i w^(1+y)``, a pure loss term for every ``y``.
* In complex-domain models ``nabla^y`` has DFT symbol ``(-i|kappa|)^y``; at
  ``y = 2`` that is ``-kappa^2``, the Laplacian itself.
* Complex-domain fields are analytic signals (positive frequencies only).
  Negative-frequency content is not damped by these forms and is never
  injected by the drivers in this package.
* Structural damping is written with ``(1 - i eta)`` in this convention; it
  is the same complex stiffness that reads ``(1 + i eta)`` under ``exp(+iwt)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StabilityError
from .frac_calculus import FracOrder, HistoryBuffer, frac_deriv_gl, gl_weights
from .frac_laplacian import (
    Grid1D,
    apply_symbol,
    build_laplacian,
    frac_power_apply,
    magnitude_symbol,
)
from .pulses import PulseSpec, analytic_signal, make_pulse
from . import csvio


class ModelKind(enum.Enum):
    LOSSLESS = "lossless"
    TEMPORAL_REAL = "temporal_real"
    TEMPORAL_COMPLEX = "temporal_complex"
    SPATIAL_REAL = "spatial_real"
    SPATIAL_COMPLEX = "spatial_complex"
    STRUCTURAL = "structural"


TEMPORAL = (ModelKind.TEMPORAL_REAL, ModelKind.TEMPORAL_COMPLEX)
SPATIAL = (ModelKind.SPATIAL_REAL, ModelKind.SPATIAL_COMPLEX)
COMPLEX_DOMAIN = (ModelKind.TEMPORAL_COMPLEX, ModelKind.SPATIAL_COMPLEX, ModelKind.STRUCTURAL)


@dataclass(frozen=True)
class WaveModel:
    kind: ModelKind
    eta: float = 0.0

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, ModelKind) else ModelKind(str(self.kind).lower())
        object.__setattr__(self, "kind", kind)
        if not math.isfinite(self.eta) or self.eta < 0:
            raise ValueError(f"structural damping eta must be finite and >= 0, got {self.eta!r}")
        if self.eta and kind is not ModelKind.STRUCTURAL:
            raise ValueError(f"eta only applies to structural damping, not {kind.value}")

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def complex_domain(self) -> bool:
        return self.kind in COMPLEX_DOMAIN

    @property
    def temporal(self) -> bool:
        return self.kind in TEMPORAL


LOSSLESS = WaveModel(ModelKind.LOSSLESS)
TEMPORAL_REAL = WaveModel(ModelKind.TEMPORAL_REAL)
TEMPORAL_COMPLEX = WaveModel(ModelKind.TEMPORAL_COMPLEX)
SPATIAL_REAL = WaveModel(ModelKind.SPATIAL_REAL)
SPATIAL_COMPLEX = WaveModel(ModelKind.SPATIAL_COMPLEX)


def structural(eta: float) -> WaveModel:
    return WaveModel(ModelKind.STRUCTURAL, eta)


@dataclass(frozen=True)
class MediumParams:
    """Wave speed ``c`` (m/s), attenuation coefficient ``alpha0``, power-law exponent ``y``."""

    c: float
    alpha0: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"wave speed must be positive, got {self.c!r}")
        if not (math.isfinite(self.alpha0) and self.alpha0 >= 0):
            raise ValueError(f"alpha0 must be >= 0, got {self.alpha0!r}")
        y = FracOrder(self.y).value
        if y > 2.0:
            raise ValueError(f"power-law exponent must lie in [0, 2], got {y!r}")
        object.__setattr__(self, "y", y)


def complex_prefactor(y: float) -> complex:
    """``i^(-3y)`` evaluated as ``(i^-3)^y = exp(i pi y / 2)``."""
    return complex(np.exp(0.5j * math.pi * y))


def damping_coefficient(model: WaveModel, medium: MediumParams) -> float:
    """Real amplitude in front of the damping operator (without the complex prefactor)."""
    c, a0, y = medium.c, medium.alpha0, medium.y
    if model.kind in TEMPORAL:
        return 2.0 * a0 / c ** (1.0 + 2.0 * y)
    if model.kind in SPATIAL:
        return 2.0 * a0 / c ** (1.0 + y)
    return 0.0


def complex_spatial_symbol(grid: Grid1D, y: float) -> np.ndarray:
    """DFT symbol of ``i^(-3y) nabla^y`` with ``nabla^y <-> (-i|kappa|)^y``."""
    mag = magnitude_symbol(grid, y)
    return complex_prefactor(y) * np.exp(-0.5j * math.pi * y) * mag


@dataclass
class WaveState:
    """Field at the two newest levels plus whatever memory the model needs.

    ``history`` (temporal models) holds every level from the start, newest
    last, and is appended in place by :meth:`WaveSolver.step`.
    ``aux_prev`` is the damping quantity at the previous level for models that
    time-difference it.
    """

    p_now: np.ndarray
    p_prev: np.ndarray
    t: float = 0.0
    history: HistoryBuffer | None = None
    aux_prev: np.ndarray | None = None
    step_index: int = 0

    def imag_residue(self) -> float:
        scale = np.abs(self.p_now).max()
        return float(np.abs(self.p_now.imag).max() / scale) if scale > 0 else 0.0


class WaveSolver:
    """Leapfrog stepper bound to one model, medium, grid and time step.

    ``spatial_path`` selects how ``A^(y/2)`` is applied for ``spatial_real``:
    ``"matrix"`` (dense eigendecomposition) or ``"fft"`` (periodic only).
    ``kcut`` (rad/m, periodic grids) projects every new level onto DFT modes
    with ``|kappa| <= kcut``; complex-domain runs use it to remove grid-scale
    round-off before the undamped negative-frequency branch can amplify it.
    """

    def __init__(self, model: WaveModel, medium: MediumParams, grid: Grid1D, dt: float,
                 spatial_path: str = "matrix", history_window: int | None = None,
                 kcut: float | None = None):
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt!r}")
        if spatial_path not in ("matrix", "fft"):
            raise ValueError(f"spatial_path must be 'matrix' or 'fft', got {spatial_path!r}")
        if model.kind is ModelKind.SPATIAL_COMPLEX and not grid.periodic:
            raise ValueError("spatial_complex needs a periodic grid (spectral symbol)")
        if spatial_path == "fft" and not grid.periodic:
            raise ValueError("the fft path needs a periodic grid")
        self.model, self.medium, self.grid, self.dt = model, medium, grid, float(dt)
        self.spatial_path = spatial_path
        self.history_window = history_window
        self._keep = None
        if kcut is not None:
            if not grid.periodic:
                raise ValueError("a wavenumber cutoff needs a periodic grid")
            self._keep = np.abs(grid.wavenumbers()) <= kcut
        self.coef = damping_coefficient(model, medium)
        self.damped = self.coef > 0 or (model.kind is ModelKind.STRUCTURAL and model.eta > 0)
        self._op = None
        self._symbol = None
        self._weights = None
        y = medium.y
        if self.coef > 0:
            if model.kind is ModelKind.SPATIAL_REAL:
                if spatial_path == "matrix":
                    self._op = build_laplacian(grid)
                else:
                    self._symbol = magnitude_symbol(grid, y)
            elif model.kind is ModelKind.SPATIAL_COMPLEX:
                self._symbol = complex_spatial_symbol(grid, y)
        self._gl_order = {ModelKind.TEMPORAL_REAL: y, ModelKind.TEMPORAL_COMPLEX: 1.0 + y}.get(model.kind)
        # A backward GL sum of order s is centred s*dt/2 behind the newest level.
        # For 2 < s < 3 the sum is taken one level ahead instead, cutting the lag
        # below dt/2; only its w_0 term touches the unknown level.  At s = 3 the
        # plain lagged sum is kept: its extra numerical damping is what holds
        # down the runaway root of the y = 2 equation.
        self.shifted_gl = model.kind is ModelKind.TEMPORAL_COMPLEX and 1.0 < y < 2.0
        self._stiffness = 1.0 - 1j * model.eta if model.kind is ModelKind.STRUCTURAL else 1.0

    # -- operators ---------------------------------------------------------
    def neg_laplacian(self, p: np.ndarray) -> np.ndarray:
        """``A p`` via the stencil (no dense matrix needed)."""
        h2 = self.grid.h ** 2
        if self.grid.periodic:
            return (2.0 * p - np.roll(p, 1) - np.roll(p, -1)) / h2
        out = 2.0 * p
        out[1:] -= p[:-1]
        out[:-1] -= p[1:]
        return out / h2

    def _gl(self, history: HistoryBuffer, order: float):
        m = len(history)
        if self._weights is None or len(self._weights) < m + 1:
            self._weights = gl_weights(order, max(2 * m, 64))
        return frac_deriv_gl(history, order, self._weights)

    def _gl_tail(self, history: HistoryBuffer, order: float):
        """``dt^-s sum_{k>=1} w_k p_{n+1-k}``: the explicit part of a GL sum centred one level ahead."""
        m = len(history)
        if self._weights is None or len(self._weights) < m + 1:
            self._weights = gl_weights(order, max(2 * m, 64))
        w = self._weights.weights[1:m + 1][::-1]
        return np.tensordot(w, history.samples, axes=(0, 0)) * self.dt ** (-order)

    def damping_quantity(self, p: np.ndarray, history: HistoryBuffer | None):
        """Quantity ``q`` that is time-differenced (real-domain/spatial models), or ``None``."""
        kind = self.model.kind
        if self.coef == 0:
            return None
        if kind is ModelKind.TEMPORAL_REAL:
            return np.abs(self._gl(history, self._gl_order))
        if kind is ModelKind.SPATIAL_REAL:
            if self._op is not None:
                return frac_power_apply(self._op, 0.5 * self.medium.y, p)
            return apply_symbol(p, self._symbol)
        if kind is ModelKind.SPATIAL_COMPLEX:
            return apply_symbol(p, self._symbol)
        return None

    # -- state -------------------------------------------------------------
    def initial_state(self, p_now=None, p_prev=None, past=None) -> WaveState:
        """Start from ``p_now`` at ``t = 0`` with ``p_prev`` at ``t = -dt``.

        Defaults are the quiescent state.  ``p_prev`` defaults to ``p_now``
        (zero initial velocity).  Temporal models see ``past`` (oldest first,
        ending at ``p_prev``) as their memory; by default the memory starts at
        ``p_prev`` and everything earlier is zero.
        """
        n = self.grid.n
        p_now = np.zeros(n, dtype=complex) if p_now is None else np.asarray(p_now, dtype=complex).copy()
        p_prev = p_now.copy() if p_prev is None else np.asarray(p_prev, dtype=complex).copy()
        if p_now.shape != (n,) or p_prev.shape != (n,):
            raise ValueError("initial fields must match the grid size")
        history = None
        aux_prev = None
        if self.model.temporal:
            history = HistoryBuffer(self.dt, window=self.history_window, shape=(n,), dtype=complex)
            if past is not None:
                for row in np.asarray(past, dtype=complex):
                    history.append(row)
            else:
                history.append(p_prev)
            if self.model.kind is ModelKind.TEMPORAL_REAL and self.coef > 0:
                aux_prev = self.damping_quantity(p_prev, history)
            history.append(p_now)
        else:
            aux_prev = self.damping_quantity(p_prev, None)
        return WaveState(p_now, p_prev, 0.0, history, aux_prev)

    def step(self, state: WaveState, forcing=None) -> WaveState:
        """Advance one leapfrog step; ``forcing`` is added to ``p_tt`` at the current level."""
        p, pm = state.p_now, state.p_prev
        c, dt = self.medium.c, self.dt
        rhs = -self._stiffness * self.neg_laplacian(p)
        q = None
        diag = 1.0
        if self.coef > 0:
            kind = self.model.kind
            if kind is ModelKind.TEMPORAL_COMPLEX:
                g = complex_prefactor(self.medium.y) * self.coef
                if self.shifted_gl:
                    rhs -= g * self._gl_tail(state.history, self._gl_order)
                    diag += (c * dt) ** 2 * g * dt ** (-self._gl_order)
                else:
                    rhs -= g * self._gl(state.history, self._gl_order)
            else:
                q = self.damping_quantity(p, state.history)
                rhs -= self.coef * (q - state.aux_prev) / dt
        p_next = 2.0 * p - pm + (c * dt) ** 2 * rhs
        if forcing is not None:
            p_next += dt**2 * forcing
        if diag != 1.0:
            p_next /= diag
        if self._keep is not None:
            p_next = np.fft.ifft(np.where(self._keep, np.fft.fft(p_next), 0.0))
        if state.history is not None:
            state.history.append(p_next)
        aux = q if q is not None else state.aux_prev
        return WaveState(p_next, p, state.t + dt, state.history, aux, state.step_index + 1)

    def energy(self, p_next: np.ndarray, p_now: np.ndarray) -> float:
        """Discrete energy ``sum[(p_t)^2/c^2 + p_next . A p_now] h``, exactly conserved when lossless."""
        c, dt, h = self.medium.c, self.dt, self.grid.h
        pt = (p_next - p_now) / dt
        kin = np.sum(np.abs(pt) ** 2) / c**2
        pot = np.real(np.vdot(p_next, self.neg_laplacian(p_now)))
        return float((kin + pot) * h)


def step(state: WaveState, model: WaveModel, medium: MediumParams, grid: Grid1D, dt: float,
         forcing=None, check_stability: bool = False) -> WaveState:
    """One leapfrog step; builds a throwaway :class:`WaveSolver` (use the class in loops)."""
    if check_stability:
        limit = stable_dt(model, medium, grid)
        if dt > limit * (1 + 1e-12):
            raise StabilityError(f"dt={dt:g} exceeds the probed stable step {limit:g}")
    return WaveSolver(model, medium, grid, dt).step(state, forcing)


# -- stability probe ----------------------------------------------------------

def _discrete_omega(grid: Grid1D, c: float, dt: float) -> np.ndarray:
    """Lossless leapfrog frequency per DFT mode (non-negative)."""
    kappa = grid.wavenumbers()
    arg = np.clip(1.0 - 0.5 * (c * dt * kappa) ** 2, -1.0, 1.0)
    return np.arccos(arg) / dt


def analytic_travelling_state(solver: WaveSolver, profile, n_past: int = 0) -> WaveState:
    """Positive-frequency, right-going lossless wave whose ``t = 0`` snapshot is ``profile``'s k > 0 part.

    Temporal models get ``n_past`` earlier levels of the same lossless motion as memory.
    """
    grid, dt = solver.grid, solver.dt
    spec = np.fft.fft(np.asarray(profile, dtype=float))
    m = np.fft.fftfreq(grid.n) * grid.n
    spec = np.where(m > 0, 2.0 * spec, 0.0)
    omega = _discrete_omega(grid, solver.medium.c, dt)
    levels = [np.fft.ifft(spec * np.exp(1j * omega * j * dt)) for j in range(max(n_past, 1), -1, -1)]
    past = levels[:-1] if solver.model.temporal else None
    return solver.initial_state(levels[-1], levels[-2], past=past)


def probe_growth(model: WaveModel, medium: MediumParams, grid: Grid1D, dt: float, steps: int,
                 kcut: float | None = None) -> float:
    """Peak |p| over the second half of a ``steps``-step run over the peak in the first half.

    The run starts from a bump 1.5 h wide at the grid centre (an analytic
    right-going bump for complex-domain models on periodic grids).  Returns
    ``inf`` as soon as the peak passes 1e8 times its initial value.
    """
    solver = WaveSolver(model, medium, grid, dt, spatial_path="fft" if grid.periodic else "matrix", kcut=kcut)
    x = grid.x
    xc = x[grid.n // 2]
    bump = np.exp(-(((x - xc) / (1.5 * grid.h)) ** 2))
    if model.complex_domain and grid.periodic:
        state = analytic_travelling_state(solver, bump, n_past=steps)
    else:
        state = solver.initial_state(bump)
    peaks = np.empty(steps + 1)
    peaks[0] = np.abs(state.p_now).max()
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, steps + 1):
            state = solver.step(state)
            peaks[j] = np.abs(state.p_now).max()
            if not peaks[j] < 1e8 * peaks[0]:
                return math.inf
    if not np.all(np.isfinite(peaks)):
        return math.inf
    half = steps // 2
    return float(peaks[half:].max() / peaks[:half].max())


def stable_dt(model: WaveModel, medium: MediumParams, grid: Grid1D, sigma: float = 0.5,
              probe_steps: int = 2000, max_halvings: int = 6, kcut: float | None = None) -> float:
    """Empirically stable time step.

    Starts from ``sigma * h / c`` and runs :func:`probe_growth` for
    ``probe_steps`` steps.  The probe passes when the peak amplitude over the
    second half of the run does not exceed the peak over the first half (by
    more than 1e-6 relative for undamped runs).  On failure ``dt`` is halved,
    up to ``max_halvings`` times, and the step count doubled so every probe
    covers the same physical time: an instability whose rate does not depend on
    ``dt`` cannot hide behind a shorter probe.  Once a halving leaves a finite
    growth factor no smaller than before, the growth does not respond to the
    time step and the search stops early.
    """
    dt = sigma * grid.h / medium.c
    steps = probe_steps
    damped = damping_coefficient(model, medium) > 0 or (model.kind is ModelKind.STRUCTURAL and model.eta > 0)
    allowed = 1.0 if damped else 1.0 + 1e-6
    growths = []
    for _ in range(max_halvings + 1):
        g = probe_growth(model, medium, grid, dt, steps, kcut)
        growths.append(g)
        if g <= allowed:
            return dt
        if len(growths) > 1 and math.isfinite(g) and g >= growths[-2]:
            break
        dt *= 0.5
        steps *= 2
    raise StabilityError(
        f"no stable dt for {model.name} (sigma={sigma:g}, {len(growths)} probes); probe growth factors {growths}",
        growths,
    )


# -- simulation driver ----------------------------------------------------------

INITIAL_PULSE = "initial-pulse"
DRIVEN_POINT = "driven-point"


@dataclass(frozen=True)
class SourceSpec:
    """Excitation: a Gaussian initial profile or a point force with a pulse signature.

    ``width`` (m) sets the initial profile; ``pulse`` the driven signature.
    ``analytic`` replaces a driven signature by its positive-frequency analytic
    signal (needed by complex-domain models).
    """

    kind: str
    index: int
    width: float = 0.0
    amplitude: float = 1.0
    pulse: PulseSpec | None = None
    analytic: bool = False

    def __post_init__(self):
        if self.kind not in (INITIAL_PULSE, DRIVEN_POINT):
            raise ValueError(f"source kind must be {INITIAL_PULSE!r} or {DRIVEN_POINT!r}, got {self.kind!r}")
        if self.kind == INITIAL_PULSE and not self.width > 0:
            raise ValueError("an initial pulse needs a positive width")
        if self.kind == DRIVEN_POINT and self.pulse is None:
            raise ValueError("a driven source needs a pulse signature")
        if not math.isfinite(self.amplitude):
            raise ValueError("source amplitude must be finite")

    def validate(self, grid: Grid1D) -> None:
        if not 0 <= self.index < grid.n:
            raise ValueError(f"source index {self.index} outside grid of {grid.n} points")

    def profile(self, grid: Grid1D) -> np.ndarray:
        x = grid.x
        d = x - x[self.index]
        if grid.periodic:
            d = (d + 0.5 * grid.length) % grid.length - 0.5 * grid.length
        return self.amplitude * np.exp(-0.5 * (d / self.width) ** 2)

    def forcing_series(self, dt: float, n_steps: int, c: float, grid: Grid1D | None = None):
        """Point-force amplitudes ``2 c s'(t_n)``: the radiated waveform on each side is ``s``."""
        ds = make_pulse(self.pulse, dt, n_steps * dt, grid.h if grid else None, c, derivative=True)
        f = 2.0 * c * self.amplitude * ds
        return analytic_signal(f) if self.analytic else f.astype(complex)


@dataclass
class ProbeTraces:
    t: np.ndarray
    values: np.ndarray  # (n_probes, n_t) complex
    dt: float
    probes: list = field(default_factory=list)

    def to_csv(self, path, meta=None):
        cols = ["t"]
        for j in range(len(self.probes)):
            cols += [f"probe{j}_re", f"probe{j}_im"]
        body = np.empty((len(self.t), 1 + 2 * len(self.probes)))
        body[:, 0] = self.t
        body[:, 1::2] = self.values.real.T
        body[:, 2::2] = self.values.imag.T
        return csvio.write_csv(path, cols, body, meta)


def simulate(model: WaveModel, medium: MediumParams, grid: Grid1D, source: SourceSpec | None,
             duration: float, probes, dt: float | None = None, spatial_path: str = "matrix",
             check_resolution: bool = True, observer=None, kcut: float | None = None,
             check_stability: bool = False) -> ProbeTraces:
    """Run from a quiescent or pulsed start and record the field at ``probes``.

    ``dt`` defaults to :func:`stable_dt`; a given ``dt`` is compared against it
    when ``check_stability`` is set.  A non-finite field always raises
    :class:`StabilityError`.  ``observer(state)`` is called after every step.
    """
    if not duration > 0:
        raise ValueError(f"duration must be positive, got {duration!r}")
    probes = [int(i) for i in probes]
    for i in probes:
        if not 0 <= i < grid.n:
            raise ValueError(f"probe index {i} outside grid of {grid.n} points")
    if dt is None:
        dt = stable_dt(model, medium, grid, kcut=kcut)
    elif check_stability:
        limit = stable_dt(model, medium, grid, kcut=kcut)
        if dt > limit * (1 + 1e-12):
            raise StabilityError(f"dt={dt:g} exceeds the probed stable step {limit:g}")
    if spatial_path == "fft" and not grid.periodic:
        spatial_path = "matrix"
    solver = WaveSolver(model, medium, grid, dt, spatial_path=spatial_path, kcut=kcut)
    n_steps = int(math.ceil(duration / dt - 1e-9))
    signature = None
    if source is None:
        state = solver.initial_state()
    else:
        source.validate(grid)
        if source.kind == INITIAL_PULSE:
            state = solver.initial_state(source.profile(grid))
        else:
            state = solver.initial_state()
            signature = source.forcing_series(dt, n_steps, medium.c, grid if check_resolution else None)
    values = np.empty((len(probes), n_steps + 1), dtype=complex)
    values[:, 0] = state.p_now[probes]
    forcing = np.zeros(grid.n, dtype=complex)
    for j in range(n_steps):
        f = None
        if signature is not None:
            forcing[source.index] = signature[j] / grid.h
            f = forcing
        state = solver.step(state, f)
        values[:, j + 1] = state.p_now[probes]
        if not np.isfinite(state.p_now).all():
            raise StabilityError(f"field became non-finite at step {j + 1} (t={(j + 1) * dt:g})")
        if observer is not None:
            observer(state)
    return ProbeTraces(np.arange(n_steps + 1) * dt, values, dt, probes)
