"""Command-line front end: ``fracwave {dispersion,simulate,attenuate,sweep,operators}``.

Exit codes: 0 success, 1 numerical failure (instability, non-convergence,
failed fit or a FAIL verdict), 2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .attenuation_lab import LabSetup, run_attenuation_experiment, sweep, write_sweep_csv
from .burgers_models import BurgersParams, BurgersVariant, run_burgers
from .config import RunConfig
from .dispersion import attenuation_curve, fit_power_law, log_band, write_dispersion_csv
from .errors import ConfigError, FitError, NumericalError
from .frac_laplacian import (
    Grid1D,
    build_gradient,
    build_laplacian,
    frac_power_matrix,
    spectral_frac_laplacian,
    frac_power_apply,
)
from .pulses import PulseSpec
from .wave_models import (
    DRIVEN_POINT,
    INITIAL_PULSE,
    MediumParams,
    ModelKind,
    SourceSpec,
    WaveModel,
    simulate,
)

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2
BURGERS = "burgers"


def _domain(section: str, build):
    try:
        return build()
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def _medium(cfg: RunConfig) -> MediumParams:
    c = cfg.get("medium.c")
    a0 = cfg.get("medium.alpha0", 0.0)
    y = cfg.get("medium.y", 0.0)
    return _domain("medium", lambda: MediumParams(c, a0, y))


def _model(cfg: RunConfig) -> WaveModel:
    kind = cfg.get("model.kind")
    eta = cfg.get("model.eta", 0.0) if kind == ModelKind.STRUCTURAL.value else 0.0
    return _domain("model", lambda: WaveModel(kind, eta))


def _grid(cfg: RunConfig, n=None, h=None) -> Grid1D:
    n = cfg.get("grid.n") if n is None else cfg.get("grid.n", n)
    h = cfg.get("grid.h") if h is None else cfg.get("grid.h", h)
    boundary = cfg.get("grid.boundary", "periodic")
    return _domain("grid", lambda: Grid1D(n, h, boundary))


def _pulse(cfg: RunConfig, f0=None, bandwidth=1.0) -> PulseSpec:
    f0 = cfg.get("pulse.f0") if f0 is None else cfg.get("pulse.f0", f0)
    b = cfg.get("pulse.bandwidth", bandwidth)
    amp = cfg.get("pulse.amplitude", 1.0)
    kind = cfg.get("pulse.kind", "gaussian-sine")
    return _domain("pulse", lambda: PulseSpec(f0, b, amp, kind))


def _out(args, cfg: RunConfig, name: str) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prefix = cfg.get("output.prefix", "")
    return out / f"{prefix}{name}"


def _meta(cfg: RunConfig, command: str) -> list[tuple[str, str]]:
    return [("command", command)] + cfg.echo()


# -- subcommands ------------------------------------------------------------------


def cmd_dispersion(cfg: RunConfig, args) -> int:
    model, medium = _model(cfg), _medium(cfg)
    lo = cfg.get("experiment.omega_min", 1.0)
    hi = cfg.get("experiment.omega_max", 10.0)
    n = cfg.get("experiment.n_omega", 50)
    omegas = _domain("experiment", lambda: log_band(lo, hi, n))
    points = attenuation_curve(model, medium, omegas)
    fit, err = None, None
    try:
        fit = fit_power_law(points)
    except FitError as exc:
        err = str(exc)
    path = _out(args, cfg, "dispersion.csv")
    write_dispersion_csv(path, points, fit, _meta(cfg, "dispersion"), err)
    if fit is not None:
        print(f"dispersion: {model.name} y_hat={fit.y_hat:.6f} alpha0_hat={fit.alpha0_hat:.6g} r2={fit.r2:.6f} -> {path}")
    else:
        print(f"dispersion: {model.name} no power-law fit ({err}) -> {path}")
    return EXIT_OK


def _simulate_wave(cfg: RunConfig, args) -> int:
    model, medium, grid = _model(cfg), _medium(cfg), _grid(cfg)
    duration = cfg.get("experiment.duration")
    probes_x = cfg.get("experiment.probes")
    dt = cfg.get("experiment.dt", None)
    kcut = cfg.get("experiment.kcut", None)
    kind = cfg.get("experiment.source", INITIAL_PULSE)
    index = lambda x, name: _domain("experiment", lambda: _grid_index(grid, x, name))
    probes = [index(x, "probes") for x in probes_x]
    source = None
    if kind == INITIAL_PULSE:
        sx = cfg.get("experiment.source_x")
        width = cfg.get("experiment.width")
        source = _domain("experiment", lambda: SourceSpec(INITIAL_PULSE, index(sx, "source_x"), width=width))
    elif kind == DRIVEN_POINT:
        sx = cfg.get("experiment.source_x")
        pulse = _pulse(cfg)
        source = _domain("experiment", lambda: SourceSpec(DRIVEN_POINT, index(sx, "source_x"), pulse=pulse,
                                                          analytic=model.complex_domain))
    elif kind != "none":
        raise ConfigError(f"experiment.source must be initial-pulse, driven-point or none, got {kind!r}")
    path_kind = cfg.get("model.spatial_path", "fft" if grid.periodic else "matrix")
    traces = _domain("experiment", lambda: simulate(model, medium, grid, source, duration, probes, dt=dt,
                                                    spatial_path=path_kind, kcut=kcut,
                                                    check_stability=dt is not None))
    path = _out(args, cfg, "traces.csv")
    traces.to_csv(path, _meta(cfg, "simulate") + [("dt_used", csvio.fmt(traces.dt))])
    print(f"simulate: {model.name} {len(traces.t)} samples at dt={traces.dt:.6g} -> {path}")
    return EXIT_OK


def _grid_index(grid: Grid1D, x: float, name: str) -> int:
    i = int(round(x / grid.h))
    if not 0 <= i < grid.n:
        raise ValueError(f"{name} position {x!r} m is outside the grid")
    return i


def _simulate_burgers(cfg: RunConfig, args) -> int:
    grid = _grid(cfg)
    variant = cfg.get("model.variant", "standard")
    gamma = cfg.get("model.gamma", 2.0)
    a0 = cfg.get("medium.alpha0", 0.0)
    params = _domain("model", lambda: BurgersParams(a0, gamma))
    _domain("model", lambda: BurgersVariant(variant))
    t_end = cfg.get("experiment.t_end")
    n_snap = cfg.get("experiment.snapshots", 11)
    dt = cfg.get("experiment.dt", None)
    initial = cfg.get("experiment.initial", "sine")
    bg = cfg.get("experiment.background", 0.0)
    amp = cfg.get("experiment.amplitude", 1.0)
    mode = cfg.get("experiment.mode", 1)
    x = grid.x
    if initial == "sine":
        p0 = bg + amp * np.sin(2.0 * math.pi * mode * x / grid.length)
    elif initial == "uniform":
        p0 = np.full(grid.n, bg + amp)
    else:
        raise ConfigError(f"experiment.initial must be sine or uniform, got {initial!r}")
    run = _domain("experiment", lambda: run_burgers(p0, params, variant, grid, t_end, n_snap, dt))
    path = _out(args, cfg, "snapshots.csv")
    run.to_csv(path, grid, _meta(cfg, "simulate") + [("dt_used", csvio.fmt(run.dt))])
    print(f"simulate: burgers/{variant} {n_snap} snapshots at dt={run.dt:.6g} -> {path}")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    if cfg.get("model.kind") == BURGERS:
        return _simulate_burgers(cfg, args)
    return _simulate_wave(cfg, args)


def _lab_setup(cfg: RunConfig) -> LabSetup:
    d = LabSetup()
    pulse = _pulse(cfg, d.pulse.f0, d.pulse.bandwidth)
    lo = cfg.get("experiment.band_min", None)
    hi = cfg.get("experiment.band_max", None)
    if (lo is None) != (hi is None):
        raise ConfigError("experiment.band_min and experiment.band_max must be given together")
    kw = dict(
        n=cfg.get("grid.n", d.n), h=cfg.get("grid.h", d.h), dt=cfg.get("experiment.dt", d.dt),
        x_source=cfg.get("experiment.x_source", d.x_source), x1=cfg.get("experiment.x1", d.x1),
        x2=cfg.get("experiment.x2", d.x2), duration=cfg.get("experiment.duration", d.duration),
        pulse=pulse, band=None if lo is None else (lo, hi),
        snr_gate=cfg.get("experiment.snr_gate", d.snr_gate),
        window_sigmas=cfg.get("experiment.window_sigmas", d.window_sigmas),
        taper=cfg.get("experiment.taper", d.taper),
        kcut_factor=cfg.get("experiment.kcut_factor", d.kcut_factor),
    )
    setup = LabSetup(**kw)
    _domain("grid", lambda: setup.grid)
    return setup


def cmd_attenuate(cfg: RunConfig, args) -> int:
    model, medium = _model(cfg), _medium(cfg)
    setup = _lab_setup(cfg)
    result = _domain("experiment", lambda: run_attenuation_experiment(model, medium, setup))
    path = _out(args, cfg, "attenuation.csv")
    result.to_csv(path, _meta(cfg, "attenuate") + [("tolerance", csvio.fmt(args.tolerance))])
    if result.fit is None:
        print(f"attenuate: {model.name} fit rejected: {result.fit_error} -> {path}", file=sys.stderr)
        return EXIT_NUMERICAL
    gap = abs(result.fit.y_hat - medium.y)
    verdict = "PASS" if gap <= args.tolerance else "FAIL"
    print(f"{verdict}: {model.name} y={medium.y:g} y_hat={result.fit.y_hat:.4f} |y_hat-y|={gap:.4f} "
          f"tolerance={args.tolerance:g} alpha0_hat={result.fit.alpha0_hat:.5g} -> {path}")
    return EXIT_OK if verdict == "PASS" else EXIT_NUMERICAL


def cmd_sweep(cfg: RunConfig, args) -> int:
    names = cfg.get("experiment.models", ["temporal_complex", "spatial_complex"])
    models = [_domain("experiment", lambda n=n: WaveModel(n)) for n in names]
    ys = cfg.get("experiment.ys", [0.5, 1.0, 1.5])
    a0s = cfg.get("experiment.alpha0s", [0.01])
    c = cfg.get("medium.c", 1.0)
    setup = _lab_setup(cfg)
    rows = sweep(models, ys, a0s, setup, c=c)
    path = _out(args, cfg, "sweep.csv")
    write_sweep_csv(path, rows, _meta(cfg, "sweep"))
    failed = sum(1 for r in rows if r.error)
    print(f"sweep: {len(rows)} cells, {failed} with errors -> {path}")
    return EXIT_OK


def cmd_operators(cfg: RunConfig, args) -> int:
    grid = _grid(cfg, n=16, h=1.0)
    r = cfg.get("experiment.power", 0.5)
    if r < 0:
        raise ConfigError(f"experiment.power must be non-negative, got {r!r}")
    op = build_laplacian(grid)
    a = op.matrix
    a_half = frac_power_matrix(op, 0.5)
    a_r = frac_power_matrix(op, r)
    b = build_gradient(grid).matrix
    scale = np.abs(a).max()
    u = np.cos(2.0 * math.pi * 3 * grid.x / grid.length) + np.sin(2.0 * math.pi * grid.x / grid.length) ** 2
    report = [
        ("n", grid.n), ("h", grid.h), ("boundary", grid.boundary),
        ("symmetry_residual_A", float(np.abs(a - a.T).max())),
        ("symmetry_residual_A_half", float(np.abs(a_half - a_half.T).max())),
        ("sqrt_square_residual_rel", float(np.abs(a_half @ a_half - a).max() / scale)),
        ("skew_residual_B", float(np.abs(b + b.T).max())),
        ("B_minus_A_half_max", float(np.abs(b - a_half).max())),
        ("power_r", r),
        ("A_r_minus_identity_max", float(np.abs(a_r - np.eye(grid.n)).max())),
    ]
    if grid.periodic:
        dev = np.abs(spectral_frac_laplacian(u, 1.0, grid) - frac_power_apply(op, 0.5, u)).max()
        report.append(("matrix_vs_fft_deviation", float(dev / np.abs(frac_power_apply(op, 0.5, u)).max())))
    else:
        report.append(("matrix_vs_fft_deviation", "n/a (dirichlet)"))
    report += [(f"eigenvalue_{i}", float(v)) for i, v in enumerate(op.eigenvalues)]
    meta = _meta(cfg, "operators")
    cols = [f"c{j}" for j in range(grid.n)]
    csvio.write_csv(_out(args, cfg, "A.csv"), cols, a, meta)
    csvio.write_csv(_out(args, cfg, "A_half.csv"), cols, a_half, meta)
    csvio.write_csv(_out(args, cfg, "A_r.csv"), cols, a_r, meta)
    csvio.write_csv(_out(args, cfg, "B.csv"), cols, b, meta)
    path = _out(args, cfg, "operators_report.csv")
    csvio.write_csv(path, ("metric", "value"), report, meta)
    summary = dict(report)
    print(f"operators: n={grid.n} {grid.boundary} ||B+B^T||={summary['skew_residual_B']:.3g} "
          f"||B-A^1/2||={summary['B_minus_A_half_max']:.3g} -> {path}")
    return EXIT_OK


HELP = {
    "dispersion": "complex wavenumber, attenuation and phase speed over a frequency band",
    "simulate": "time-domain run recording probe traces (wave models) or snapshots (Burgers)",
    "attenuate": "two-probe attenuation experiment with a PASS/FAIL verdict on the fitted exponent",
    "sweep": "attenuation experiments over models, exponents and coefficients",
    "operators": "discrete Laplacian, its square root and the gradient, with identity checks",
}

COMMANDS = {
    "dispersion": cmd_dispersion,
    "simulate": cmd_simulate,
    "attenuate": cmd_attenuate,
    "sweep": cmd_sweep,
    "operators": cmd_operators,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracwave", description="Fractional lossy wave models: analysis and experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", required=True, help="INI-style run configuration")
        p.add_argument("--out", default=".", help="output directory (created if missing)")
        p.add_argument("--seed", type=int, default=None, help="reserved; every algorithm is deterministic")
        p.add_argument("--tolerance", type=float, default=0.1, help="attenuate verdict tolerance on |y_hat - y|")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = RunConfig.from_file(args.config)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
