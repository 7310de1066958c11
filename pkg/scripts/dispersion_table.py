"""Attenuation law of every wave model from its dispersion relation.

For each model and y, solves for the complex wavenumber over omega in [1, 10]
and fits alpha = alpha0_hat * omega^y_hat.  Loss per wavelength is shown for
structural damping, whose attenuation is proportional to omega.

    python3 scripts/dispersion_table.py [--alpha0 0.01] [--eta 0.2]
"""

import argparse

from fracwave.dispersion import attenuation_curve, fit_power_law, log_band, loss_per_wavelength
from fracwave.errors import FitError
from fracwave.wave_models import (
    SPATIAL_COMPLEX,
    SPATIAL_REAL,
    TEMPORAL_COMPLEX,
    TEMPORAL_REAL,
    MediumParams,
    structural,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha0", type=float, default=0.01)
    parser.add_argument("--eta", type=float, default=0.2)
    args = parser.parse_args()
    band = log_band(1.0, 10.0, 50)
    print(f"{'model':<18}{'y':>5}{'y_hat':>10}{'alpha0_hat':>12}{'v(1)':>10}{'v(10)':>10}")
    for model in (TEMPORAL_REAL, TEMPORAL_COMPLEX, SPATIAL_REAL, SPATIAL_COMPLEX):
        for y in (0.0, 0.5, 1.0, 1.5, 2.0):
            pts = attenuation_curve(model, MediumParams(1.0, args.alpha0, y), band)
            try:
                fit = fit_power_law(pts)
                cells = f"{fit.y_hat:>10.5f}{fit.alpha0_hat:>12.5g}"
            except FitError as exc:
                cells = f"  {exc}"
            print(f"{model.name:<18}{y:>5g}{cells}{pts[0].phase_speed:>10.6f}{pts[-1].phase_speed:>10.6f}")
    pts = attenuation_curve(structural(args.eta), MediumParams(1.0, 0.0, 0.0), log_band(1.0, 100.0, 5))
    losses = ", ".join(f"{loss_per_wavelength(p):.12f}" for p in pts)
    print(f"structural eta={args.eta:g}: loss per wavelength over omega in [1, 100]: {losses}")


if __name__ == "__main__":
    main()
