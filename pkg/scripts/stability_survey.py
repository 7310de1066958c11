"""Probe every wave model over y in {0, 0.5, 1, 1.5, 2}: the dt that stable_dt
returns and the growth of a 2000-step run at that dt.

    python3 scripts/stability_survey.py [--no-kcut] [--out stability.csv]
"""

import argparse
import math
import time

from fracwave import csvio
from fracwave.errors import StabilityError
from fracwave.frac_laplacian import Grid1D
from fracwave.wave_models import (
    SPATIAL_COMPLEX,
    SPATIAL_REAL,
    TEMPORAL_COMPLEX,
    TEMPORAL_REAL,
    MediumParams,
    probe_growth,
    stable_dt,
    structural,
)

MODELS = [TEMPORAL_REAL, TEMPORAL_COMPLEX, SPATIAL_REAL, SPATIAL_COMPLEX, structural(0.2)]
YS = [0.0, 0.5, 1.0, 1.5, 2.0]
# the attenuation lab's cutoff for its default pulse: 1.5 * 2 pi f_max / c
LAB_KCUT = 1.5 * 2.0 * math.pi * 0.8 * 2.3


def survey(kcut=LAB_KCUT, n=400, h=0.05, alpha0=0.01, steps=2000):
    grid = Grid1D(n, h)
    rows = []
    for model in MODELS:
        for y in YS if model.kind.value != "structural" else [0.0]:
            medium = MediumParams(1.0, alpha0, y)
            cut = kcut if model.complex_domain else None
            start = time.perf_counter()
            try:
                dt = stable_dt(model, medium, grid, kcut=cut)
                growth = probe_growth(model, medium, grid, dt, steps, cut)
            except StabilityError:
                dt, growth = math.nan, math.nan
            rows.append((model.name, y, cut if cut is not None else math.nan, dt, growth,
                         time.perf_counter() - start))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--no-kcut", action="store_true", help="run complex-domain models without a cutoff")
    parser.add_argument("--out", default="stability.csv")
    args = parser.parse_args()
    rows = survey(kcut=None if args.no_kcut else LAB_KCUT)
    print(f"{'model':<18}{'y':>5}{'dt':>10}{'growth':>12}{'seconds':>9}  verdict")
    for name, y, _, dt, growth, secs in rows:
        if math.isnan(dt):
            verdict = "no stable dt (StabilityError)"
        else:
            verdict = "grows" if growth > 1.0 else "ok"
        print(f"{name:<18}{y:>5g}{dt:>10.4g}{growth:>12.4g}{secs:>9.1f}  {verdict}")
    csvio.write_csv(args.out, ("model", "y", "kcut", "dt", "growth_2000", "seconds"),
                    [(r[0],) + r[1:] for r in rows], [("grid", "n=400 h=0.05 periodic"), ("alpha0", "0.01")])


if __name__ == "__main__":
    main()
