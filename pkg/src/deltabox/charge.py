"""Oscillatory Volterra machinery: the causal mode-sum operator U and the charge march.

The evolution of a state coupled to the origin is carried by a single complex
function of time, the charge q.  It solves a Volterra-type equation whose
kernel is the odd-mode sum of e^{-i*lam_k*(t-s)}; that raw kernel is weakly
singular on the diagonal, so U is always evaluated through its integrated
form

    (Uq)(t) = sum_k [ q(t) - q(0) e^{-i*lam_k*t} - int_0^t q'(s) e^{-i*lam_k*(t-s)} ds ] / (i*lam_k)

whose retained terms decay at least like 1/lam_k.  The instantaneous
coefficient sum_k 1/(i*lam_k) is replaced by its analytic value pi^2/(2i),
which removes the dominant truncation bias for free.  The charge is modeled
as piecewise linear in time and every per-mode oscillatory integral is done
in closed form per segment (product integration), so each time step costs one
scalar linear solve plus an O(k_max) accumulator update.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainCompatibilityError,
    InputError,
    SingularityError,
    StepSingularityError,
)
from .greens import SpectralShift, green_coefficients, green_origin
from .kernels import (
    ODD_INVERSE_EIGENVALUE_SUM,
    discrete_h1_norm,
    odd_eigenvalues,
    phi1,
    slope_moments,
    tail_deficit,
)
from .spectral import (
    DEFAULT_K_MAX,
    SpectralCoefficients,
    TimeGrid,
    free_origin_series,
    origin_trace,
)

STEP_SINGULARITY_MARGIN = 1e-12
BOUNDARY_COMPAT_TOL = 1e-9


@dataclass(frozen=True)
class CouplingProfile:
    """Coupling strength alpha(t) on [0, t_end] with pointwise value and derivative.

    kinds: 'constant' (value amplitude), 'sine_bump' (amplitude*sin(pi t/T),
    vanishing at both ends), 'piecewise_linear' (node samples on a uniform
    grid).  h10 marks profiles with alpha(0) = alpha(t_end) = 0 exactly.
    """

    kind: str
    t_end: float
    amplitude: float = 0.0
    samples: np.ndarray | None = field(default=None, repr=False)
    h10: bool = False

    def __post_init__(self):
        if self.kind not in ("constant", "sine_bump", "piecewise_linear"):
            raise InputError(f"unknown coupling kind {self.kind!r}")
        if not np.isfinite(self.t_end) or self.t_end <= 0:
            raise InputError("t_end must be positive and finite")
        if self.kind == "piecewise_linear":
            if self.samples is None:
                raise InputError("piecewise_linear profile needs samples")
            arr = np.ascontiguousarray(self.samples, dtype=complex)
            if arr.ndim != 1 or arr.size < 2:
                raise InputError("samples must be a 1-d array with at least two nodes")
            if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
                raise InputError("samples must be finite")
            if self.h10 and (arr[0] != 0 or arr[-1] != 0):
                raise InputError("h10 profile must vanish at both endpoints")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, "samples", arr)
        else:
            if not np.isfinite(self.amplitude):
                raise InputError("amplitude must be finite")
            if self.kind == "constant":
                object.__setattr__(self, "h10", self.amplitude == 0.0)
            else:
                object.__setattr__(self, "h10", True)

    @classmethod
    def zero(cls, t_end: float) -> "CouplingProfile":
        return cls("constant", t_end, 0.0)

    @classmethod
    def constant(cls, amplitude: float, t_end: float) -> "CouplingProfile":
        return cls("constant", t_end, amplitude)

    @classmethod
    def sine_bump(cls, amplitude: float, t_end: float) -> "CouplingProfile":
        return cls("sine_bump", t_end, amplitude)

    @classmethod
    def piecewise_linear(cls, grid: TimeGrid, samples, h10: bool = False) -> "CouplingProfile":
        arr = np.asarray(samples, dtype=complex)
        if arr.shape != (grid.n_steps + 1,):
            raise InputError("samples must match the grid nodes")
        return cls("piecewise_linear", grid.t_end, 0.0, arr, h10)

    @property
    def is_real(self) -> bool:
        if self.kind == "piecewise_linear":
            return bool(np.all(self.samples.imag == 0))
        return True

    def _check_time(self, t: np.ndarray):
        if np.any(t < -1e-12) or np.any(t > self.t_end * (1 + 1e-12) + 1e-12):
            raise InputError("profile evaluated outside [0, t_end]")

    def value(self, t) -> np.ndarray | complex:
        ta = np.asarray(t, dtype=float)
        self._check_time(ta)
        if self.kind == "constant":
            out = np.full(ta.shape, self.amplitude, dtype=float)
        elif self.kind == "sine_bump":
            out = self.amplitude * np.sin(np.pi * ta / self.t_end)
        else:
            nodes = np.linspace(0.0, self.t_end, self.samples.size)
            out = np.interp(ta, nodes, self.samples.real).astype(complex)
            if not self.is_real:
                out = out + 1j * np.interp(ta, nodes, self.samples.imag)
        return out if np.ndim(t) else out[()]

    def derivative(self, t) -> np.ndarray | complex:
        ta = np.asarray(t, dtype=float)
        self._check_time(ta)
        if self.kind == "constant":
            out = np.zeros(ta.shape)
        elif self.kind == "sine_bump":
            out = self.amplitude * np.pi / self.t_end * np.cos(np.pi * ta / self.t_end)
        else:
            dt = self.t_end / (self.samples.size - 1)
            slopes = np.diff(self.samples) / dt
            idx = np.clip((ta / dt).astype(int), 0, slopes.size - 1)
            out = slopes[idx]
        return out if np.ndim(t) else out[()]

    def values_on(self, grid: TimeGrid) -> np.ndarray:
        return np.atleast_1d(self.value(grid.times))

    def scaled(self, c: float) -> "CouplingProfile":
        if self.kind == "piecewise_linear":
            return CouplingProfile(self.kind, self.t_end, 0.0, self.samples * c, self.h10)
        return CouplingProfile(self.kind, self.t_end, self.amplitude * c, None, self.h10)


@dataclass(frozen=True)
class ChargeTrajectory:
    """Grid samples of the charge plus the per-mode slope-integrated accumulators
    B_k = int_0^T q'(s) e^{i*lam_k*s} ds at the final node."""

    grid: TimeGrid
    q: np.ndarray = field(repr=False)
    k_max: int = DEFAULT_K_MAX
    mode_accumulators: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.q, dtype=complex).copy()
        if arr.shape != (self.grid.n_steps + 1,):
            raise InputError("charge samples must match the grid nodes")
        if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
            raise InputError("charge samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "q", arr)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.q)))


def apply_U(traj: ChargeTrajectory, analytic_tail: bool = True) -> np.ndarray:
    """(Uq)(t_n) on every grid node via the integrated form.

    analytic_tail swaps the truncated instantaneous coefficient
    sum_{k<=k_max} 1/lam_k for the analytic pi^2/2.  (Uq)(t_0) = 0 always
    (empty integral); the tail replacement only applies to marched nodes.
    """
    grid, q, k_max = traj.grid, traj.q, traj.k_max
    if grid.n_steps < 1:
        raise InputError("empty grid")
    dt = grid.dt
    times = grid.times
    lam = odd_eigenvalues(k_max)
    s_tail = ODD_INVERSE_EIGENVALUE_SUM if analytic_tail else float(np.sum(1.0 / lam))
    q0 = q[0]
    acc = np.zeros(times.size, dtype=complex)
    for lam_k in lam:
        seg = slope_moments(q, dt, lam_k)
        b_nodes = np.concatenate(([0.0], np.cumsum(seg)))
        acc += np.exp(-1j * lam_k * times) * (q0 + b_nodes) / lam_k
    out = -1j * s_tail * q + 1j * acc
    out[0] = 0.0
    return out


def initial_charge(f0: complex, phi0: complex, shift: SpectralShift | complex = SpectralShift(),
                   green_value: complex | None = None) -> complex:
    """v(0) = f(0) / (1 + phi(0) * G^lam(0,0)).

    A vanishing denominator is the static eigenvalue condition of the coupled
    Hamiltonian and raises SingularityError.
    """
    lam = shift.lam if isinstance(shift, SpectralShift) else complex(shift)
    g0 = green_origin(lam) if green_value is None else complex(green_value)
    den = 1.0 + complex(phi0) * g0
    if abs(den) < STEP_SINGULARITY_MARGIN:
        raise SingularityError(
            "1 + phi(0)*G(0,0) vanishes: initial coupling sits on an eigenvalue configuration")
    return complex(f0) / den


def _march(f_nodes: np.ndarray, phi_nodes: np.ndarray, v0: complex, g_coeff: complex,
           shift: SpectralShift, grid: TimeGrid, k_max: int) -> ChargeTrajectory:
    """Product-integration march for v = f - phi*(g_coeff*g(t) + (i/pi) U v).

    g(t) is the truncated origin series of the freely evolved Green state,
    (1/pi) sum_k e^{-i*lam_k*t}/(lam_k + lam).  At step n the unknown v_n
    enters through the instantaneous part of U and the final-segment slope,
    so the update is one scalar complex solve.
    """
    n_steps = grid.n_steps
    dt = grid.dt
    lam = odd_eigenvalues(k_max)
    lam0 = shift.lam

    u = 1j * lam * dt
    p1 = phi1(u)
    # coefficient of (v_n - v_{n-1}) inside U: i * sum_k e^{-i lam dt} phi1(u)/lam
    c_slope = np.exp(-u) * p1
    c_u = 1j * np.sum(c_slope / lam)
    denom_base = (ODD_INVERSE_EIGENVALUE_SUM + 1j * c_u) / np.pi

    q = np.empty(n_steps + 1, dtype=complex)
    q[0] = v0
    b = np.zeros(lam.size, dtype=complex)
    exp_prev = np.ones(lam.size, dtype=complex)  # e^{+i lam t_{n-1}}
    inv_lam = 1.0 / lam
    green_weights = 1.0 / (lam + lam0)

    for n in range(1, n_steps + 1):
        t_n = n * dt
        e_n = np.exp(-1j * lam * t_n)
        w_n = 1j * np.sum(e_n * (v0 + b) * inv_lam)
        rhs = f_nodes[n] - phi_nodes[n] * (1j / np.pi) * (w_n - c_u * q[n - 1])
        if g_coeff != 0:
            g_n = np.sum(e_n * green_weights) / np.pi
            rhs = rhs - phi_nodes[n] * g_coeff * g_n
        d_n = 1.0 + phi_nodes[n] * denom_base
        if abs(d_n) < STEP_SINGULARITY_MARGIN:
            raise StepSingularityError(t_n)
        q[n] = rhs / d_n
        b += (q[n] - q[n - 1]) * exp_prev * p1
        exp_prev = np.conj(e_n)

    return ChargeTrajectory(grid, q, k_max, b)


def solve_charge_general(f, phi: CouplingProfile, shift: SpectralShift, grid: TimeGrid,
                         k_max: int = DEFAULT_K_MAX, v0: complex | None = None) -> ChargeTrajectory:
    """Grid solution of v = f - phi*(v(0)*g(t) + (i/pi) U v), g the Green origin series.

    f may be a node-sample array or a callable of t.  When v0 is not supplied
    it comes from initial_charge with the closed-form Green value.
    """
    if grid.n_steps < 1:
        raise InputError("empty grid")
    times = grid.times
    f_nodes = np.asarray(f(times) if callable(f) else f, dtype=complex)
    if f_nodes.shape != times.shape:
        raise InputError("f samples must match the grid nodes")
    phi_nodes = np.atleast_1d(np.asarray(phi.values_on(grid)))
    if v0 is None:
        v0 = initial_charge(f_nodes[0], phi_nodes[0], shift)
    return _march(f_nodes, phi_nodes, complex(v0), complex(v0), shift, grid, k_max)


def solve_charge(alpha: CouplingProfile, psi0, grid: TimeGrid,
                 k_max: int = DEFAULT_K_MAX,
                 shift: SpectralShift = SpectralShift()) -> ChargeTrajectory:
    """Solve q = -alpha*(e^{it*Lap}psi0(0) + (i/pi) U q) on the grid.

    psi0 is a SpectralCoefficients vector or a DomainState-like object with
    .regular/.charge/.shift.  The initial charge is q(0) = -alpha(0)*psi0(0);
    the equation is then reduced to the general charge-like scheme with
    f = -alpha * e^{it*Lap}phi0(0) on the regular part and the Green-source
    coefficient carrying the singular part.
    """
    if not alpha.is_real:
        raise InputError("the physical coupling must be real-valued")
    times = grid.times
    alpha_nodes = np.real(alpha.values_on(grid))

    if isinstance(psi0, SpectralCoefficients):
        full = psi0
        q0 = -complex(alpha_nodes[0]) * origin_trace(psi0)
        regular = psi0.sub(green_coefficients(shift, psi0.k_max).scaled(q0))
    else:
        regular = psi0.regular
        shift = psi0.shift
        q0 = complex(psi0.charge)
        full = regular.add(green_coefficients(shift, regular.k_max).scaled(q0))
        if q0 != 0:
            resid = abs(q0 + alpha_nodes[0] * origin_trace(full))
            if resid > BOUNDARY_COMPAT_TOL:
                raise DomainCompatibilityError(
                    f"initial state violates -q = alpha*psi(0) by {resid:.3e}")
    if full.k_max != k_max:
        raise InputError(
            f"state truncation {full.k_max} must match the solver k_max {k_max}")

    f_nodes = -alpha_nodes * free_origin_series(regular, times)
    return _march(f_nodes, alpha_nodes.astype(complex), q0, q0, shift, grid, k_max)


def lipschitz_probe(alpha: CouplingProfile, alpha_tilde: CouplingProfile, psi0,
                    grid: TimeGrid, k_max: int = DEFAULT_K_MAX,
                    shift: SpectralShift = SpectralShift()) -> tuple[float, float]:
    """Discrete-H^1 distances (|q - q_tilde|, |alpha - alpha_tilde|) for ratio studies."""
    qa = solve_charge(alpha, psi0, grid, k_max, shift)
    qb = solve_charge(alpha_tilde, psi0, grid, k_max, shift)
    dq = discrete_h1_norm(qa.q - qb.q, grid.dt)
    da = discrete_h1_norm(
        np.asarray(alpha.values_on(grid), dtype=complex)
        - np.asarray(alpha_tilde.values_on(grid), dtype=complex), grid.dt)
    return dq, da
