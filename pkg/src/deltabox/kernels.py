"""Oscillatory-quadrature kernels shared by the charge solver and the propagator.

Everything here revolves around exact integration of piecewise-linear data
against the mode oscillations e^{i*lam*t}, lam = k^2/4.  The two phi functions
are the standard exponential-integrator coefficients

    phi1(u) = (e^u - 1)/u,        phi2(u) = (e^u - 1 - u)/u^2,

evaluated through a series branch for small |u| so they stay accurate down to
u = 0.  With them, a linear segment q(s) = q_a + r*(s - t_a) on [t_a, t_a+h]
integrates exactly:

    int e^{i*lam*s} q(s) ds = h*e^{i*lam*t_a} * (q_a*phi1(u) + (q_b-q_a)*(phi1(u)-phi2(u)))

with u = i*lam*h.  No quadrature error is incurred beyond the piecewise-linear
model of the data itself.
"""

from __future__ import annotations

import math

import numpy as np

# sum over odd k of 1/lam_k = sum 4/k^2 = pi^2/2
ODD_INVERSE_EIGENVALUE_SUM = np.pi**2 / 2.0

_PHI_SERIES_CUTOFF = 0.25
_PHI_SERIES_TERMS = 18


def phi1(u: np.ndarray | complex) -> np.ndarray:
    """(e^u - 1)/u with a series branch for small |u| (phi1(0) = 1)."""
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < _PHI_SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    direct = (np.exp(safe) - 1.0) / safe
    # Horner on sum_{m>=0} u^m/(m+1)!
    acc = np.full_like(u, 1.0 / math.factorial(_PHI_SERIES_TERMS + 1))
    for m in range(_PHI_SERIES_TERMS, 0, -1):
        acc = acc * u + 1.0 / math.factorial(m)
    return np.where(small, acc, direct)


def phi2(u: np.ndarray | complex) -> np.ndarray:
    """(e^u - 1 - u)/u^2 with a series branch for small |u| (phi2(0) = 1/2)."""
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < _PHI_SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    direct = (np.exp(safe) - 1.0 - safe) / safe**2
    # Horner on sum_{m>=0} u^m/(m+2)!
    acc = np.full_like(u, 1.0 / math.factorial(_PHI_SERIES_TERMS + 2))
    for m in range(_PHI_SERIES_TERMS, 0, -1):
        acc = acc * u + 1.0 / math.factorial(m + 1)
    return np.where(small, acc, direct)


def odd_modes(k_max: int) -> np.ndarray:
    """Odd mode indices 1, 3, 5, ... <= k_max."""
    return np.arange(1, k_max + 1, 2)


def odd_eigenvalues(k_max: int) -> np.ndarray:
    """Eigenvalues k^2/4 on the odd (cosine) modes up to k_max."""
    k = odd_modes(k_max)
    return 0.25 * k.astype(float) ** 2


def tail_deficit(k_max: int) -> float:
    """pi^2/2 minus the truncated sum of 1/lam_k over odd k <= k_max."""
    return ODD_INVERSE_EIGENVALUE_SUM - float(np.sum(1.0 / odd_eigenvalues(k_max)))


def segment_moments(q: np.ndarray, dt: float, lam: float) -> np.ndarray:
    """Per-segment exact integrals int_{t_{m-1}}^{t_m} q_PL(s) e^{i*lam*s} ds.

    q holds node samples (n+1,); returns the n segment contributions.
    """
    q = np.asarray(q, dtype=complex)
    n = q.size - 1
    u = 1j * lam * dt
    p1 = complex(phi1(u))
    p2 = complex(phi2(u))
    phase = np.exp(1j * lam * dt * np.arange(n))
    return dt * phase * (q[:-1] * p1 + (q[1:] - q[:-1]) * (p1 - p2))


def slope_moments(q: np.ndarray, dt: float, lam: float) -> np.ndarray:
    """Per-segment exact integrals of the piecewise-constant derivative of q_PL
    against e^{i*lam*s}: slope_m * (e^{i*lam*t_m} - e^{i*lam*t_{m-1}})/(i*lam)."""
    q = np.asarray(q, dtype=complex)
    n = q.size - 1
    u = 1j * lam * dt
    p1 = complex(phi1(u))
    phase = np.exp(1j * lam * dt * np.arange(n))
    return (q[1:] - q[:-1]) * phase * p1


def discrete_h1_norm(values: np.ndarray, dt: float) -> float:
    """Discrete H^1(0,T) norm: L^2 of the nodes plus L^2 of forward differences."""
    v = np.asarray(values, dtype=complex)
    l2 = np.sum(np.abs(v) ** 2) * dt
    dv = np.diff(v) / dt
    h1 = np.sum(np.abs(dv) ** 2) * dt
    return float(np.sqrt(l2 + h1))


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x); y is floored at 1e-300."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.maximum(np.asarray(ys, dtype=float), 1e-300))
    return float(np.polyfit(lx, ly, 1)[0])
