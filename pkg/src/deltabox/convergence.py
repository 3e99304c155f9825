"""Refinement studies backing the solver's order claims.

Each sweep returns (rows, slope): rows of (level, error) pairs plus the fitted
log-log slope, ready for CSV emission by the CLI.
"""

from __future__ import annotations

import numpy as np

from .charge import CouplingProfile, solve_charge
from .errors import InputError
from .greens import green_origin, green_series
from .kernels import fit_loglog_slope
from .spectral import SpectralCoefficients, TimeGrid


def charge_dt_sweep(dts=(4e-3, 2e-3, 1e-3), t_end: float = 2.0, amplitude: float = 0.5,
                    k_max: int = 25, refine: int = 8) -> tuple[list[tuple[float, float]], float]:
    """Self-convergence of the charge solver: sup error against a refine-times
    finer reference run, per time step size."""
    if len(dts) < 3:
        raise InputError("need at least 3 refinement levels")
    dts = sorted(float(d) for d in dts)[::-1]
    steps = [int(round(t_end / d)) for d in dts]
    for d, n in zip(dts, steps):
        if abs(n * d - t_end) > 1e-12 * max(1.0, t_end):
            raise InputError(f"dt={d} does not divide the horizon {t_end}")
    n_ref = steps[-1] * refine
    if any(n_ref % n for n in steps):
        raise InputError("refinement levels must nest into the reference grid")
    psi0 = SpectralCoefficients.unit(1, k_max)
    alpha = CouplingProfile.sine_bump(amplitude, t_end)
    ref = solve_charge(alpha, psi0, TimeGrid(t_end, n_ref), k_max)
    rows = []
    for d, n in zip(dts, steps):
        traj = solve_charge(alpha, psi0, TimeGrid(t_end, n), k_max)
        err = float(np.max(np.abs(traj.q - ref.q[:: n_ref // n])))
        rows.append((d, err))
    slope = fit_loglog_slope([r[0] for r in rows], [r[1] for r in rows])
    return rows, slope


def green_kmax_sweep(ks=(1000, 10000, 100000), z: complex = 1.0
                     ) -> tuple[list[tuple[int, float]], float]:
    """Truncation error of the origin Green series against the closed form."""
    if len(ks) < 3:
        raise InputError("need at least 3 refinement levels")
    ks = sorted(int(k) for k in ks)
    exact = green_origin(z)
    rows = []
    for k in ks:
        err = abs(green_series(0.0, 0.0, z, k) - exact)
        rows.append((k, float(err)))
    slope = -fit_loglog_slope([r[0] for r in rows], [r[1] for r in rows])
    return rows, slope
