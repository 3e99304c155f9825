"""Dirichlet eigenbasis of the box [-pi, pi] and the spectral state representation.

Modes are indexed by k = 1, 2, 3, ...:

    psi_k(x) = sin(k x / 2)/sqrt(pi)   (k even, odd function, zero at the origin)
    psi_k(x) = cos(k x / 2)/sqrt(pi)   (k odd,  even function, 1/sqrt(pi) at the origin)

with eigenvalues lam_k = k^2/4.  States live on a truncated coefficient vector
a_1..a_{k_max}; all mode sums run in ascending k (numpy's deterministic
pairwise reduction), and truncation defaults to k_max = 401.

Units: hbar = 1 and the mass is scaled so the free Hamiltonian is -d^2/dx^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingError, DomainError, InputError

BOX_HALF_WIDTH = np.pi
DEFAULT_K_MAX = 401
INV_SQRT_PI = 1.0 / np.sqrt(np.pi)


def eigenvalue(k: int) -> float:
    """Eigenvalue lam_k = k^2/4 of mode k."""
    if k < 1 or int(k) != k:
        raise InputError(f"mode index must be a positive integer, got {k!r}")
    return 0.25 * float(k) ** 2


def eigenvalues(k_max: int) -> np.ndarray:
    """Eigenvalues of modes 1..k_max."""
    k = np.arange(1, k_max + 1, dtype=float)
    return 0.25 * k**2


def _check_in_box(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > BOX_HALF_WIDTH + 1e-12):
        raise DomainError("coordinate outside the box [-pi, pi]")
    return x


def eigenmode_value(k: int, x) -> np.ndarray | float:
    """Value of psi_k at x (scalar or array), |x| <= pi."""
    if k < 1 or int(k) != k:
        raise InputError(f"mode index must be a positive integer, got {k!r}")
    xa = _check_in_box(x)
    if k % 2 == 0:
        out = INV_SQRT_PI * np.sin(0.5 * k * xa)
    else:
        out = INV_SQRT_PI * np.cos(0.5 * k * xa)
    return out if np.ndim(x) else float(out)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_n = n*dt on [0, t_end] with n_steps steps."""

    t_end: float
    n_steps: int

    def __post_init__(self):
        if not np.isfinite(self.t_end) or self.t_end < 0:
            raise InputError(f"t_end must be nonnegative and finite, got {self.t_end!r}")
        if self.n_steps < 1 or int(self.n_steps) != self.n_steps:
            raise InputError(f"n_steps must be a positive integer, got {self.n_steps!r}")

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)

    def node_index(self, t: float) -> int:
        """Index n with t_n = t; raises InputError for off-grid t."""
        n = int(round(t / self.dt))
        if n < 0 or n > self.n_steps or abs(n * self.dt - t) > 1e-9 * max(1.0, self.t_end):
            raise InputError(f"t={t!r} is not a node of the grid")
        return n


@dataclass(frozen=True)
class SpectralCoefficients:
    """Truncated complex coefficient vector of a state on the Dirichlet eigenbasis."""

    k_max: int
    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.a, dtype=complex).copy()
        if arr.shape != (self.k_max,):
            raise InputError(f"coefficient vector must have shape ({self.k_max},)")
        if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
            raise InputError("coefficients must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "a", arr)

    @classmethod
    def zeros(cls, k_max: int = DEFAULT_K_MAX) -> "SpectralCoefficients":
        return cls(k_max, np.zeros(k_max, dtype=complex))

    @classmethod
    def unit(cls, k: int, k_max: int = DEFAULT_K_MAX) -> "SpectralCoefficients":
        """The eigenstate psi_k as a coefficient vector."""
        if not 1 <= k <= k_max:
            raise InputError(f"mode {k} outside 1..{k_max}")
        a = np.zeros(k_max, dtype=complex)
        a[k - 1] = 1.0
        return cls(k_max, a)

    def norm(self) -> float:
        """L^2 norm, by Parseval just the Euclidean norm of the coefficients."""
        return float(np.linalg.norm(self.a))

    def scaled(self, c: complex) -> "SpectralCoefficients":
        return SpectralCoefficients(self.k_max, self.a * c)

    def add(self, other: "SpectralCoefficients") -> "SpectralCoefficients":
        if other.k_max != self.k_max:
            raise InputError("truncation mismatch")
        return SpectralCoefficients(self.k_max, self.a + other.a)

    def sub(self, other: "SpectralCoefficients") -> "SpectralCoefficients":
        if other.k_max != self.k_max:
            raise InputError("truncation mismatch")
        return SpectralCoefficients(self.k_max, self.a - other.a)

    def even_sector_defect(self) -> float:
        """Max |a_k| over even k; zero iff the state lies in the even sector W."""
        return float(np.max(np.abs(self.a[1::2]))) if self.k_max >= 2 else 0.0


def origin_trace(c: SpectralCoefficients) -> complex:
    """psi(0) = sum over odd k of a_k/sqrt(pi) (sine modes vanish at the origin)."""
    return complex(INV_SQRT_PI * np.sum(c.a[0::2]))


def free_evolve(c: SpectralCoefficients, t: float) -> SpectralCoefficients:
    """Free propagator: a_k -> a_k * e^{-i*lam_k*t}; unitary mode by mode."""
    lam = eigenvalues(c.k_max)
    return SpectralCoefficients(c.k_max, c.a * np.exp(-1j * lam * t))


def free_origin_series(c: SpectralCoefficients, times: np.ndarray) -> np.ndarray:
    """Origin value of the freely evolved state on a batch of times:
    sum over odd k of a_k e^{-i*lam_k*t}/sqrt(pi)."""
    times = np.asarray(times, dtype=float)
    lam = eigenvalues(c.k_max)[0::2]
    coeff = c.a[0::2]
    out = np.zeros(times.shape, dtype=complex)
    # mode-blocked accumulation keeps memory O(len(times))
    block = 64
    for j in range(0, lam.size, block):
        lj = lam[j:j + block]
        cj = coeff[j:j + block]
        out += np.exp(-1j * np.outer(lj, times)).T @ cj
    return INV_SQRT_PI * out


def evaluate_state(c: SpectralCoefficients, xs) -> np.ndarray:
    """Pointwise synthesis sum_k a_k psi_k(x) on a batch of coordinates."""
    xa = np.atleast_1d(_check_in_box(xs))
    out = np.zeros(xa.shape, dtype=complex)
    half_x = 0.5 * xa
    block = 64
    for j in range(0, c.k_max, block):
        ks = np.arange(j + 1, min(j + block, c.k_max) + 1)
        arg = np.outer(ks, half_x)
        modes = np.where((ks % 2 == 1)[:, None], np.cos(arg), np.sin(arg))
        out += modes.T @ c.a[j:j + block]
    return INV_SQRT_PI * out


def project_function(f, k_max: int = DEFAULT_K_MAX, resolution: int = 4096) -> SpectralCoefficients:
    """Coefficients (psi_k, f) by trapezoid quadrature on a uniform grid.

    resolution counts quadrature panels; fewer than 2*k_max panels cannot
    resolve the highest retained mode and raises AliasingError.
    """
    if resolution < 2 * k_max:
        raise AliasingError(
            f"resolution {resolution} < 2*k_max = {2 * k_max}: mode sums would alias")
    xs = np.linspace(-BOX_HALF_WIDTH, BOX_HALF_WIDTH, resolution + 1)
    w = np.full(xs.size, 2.0 * BOX_HALF_WIDTH / resolution)
    w[0] *= 0.5
    w[-1] *= 0.5
    try:
        fx = np.asarray(f(xs), dtype=complex)
        if fx.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        fx = np.asarray([complex(f(x)) for x in xs])
    a = np.zeros(k_max, dtype=complex)
    half_x = 0.5 * xs
    block = 64
    for j in range(0, k_max, block):
        ks = np.arange(j + 1, min(j + block, k_max) + 1)
        arg = np.outer(ks, half_x)
        modes = np.where((ks % 2 == 1)[:, None], np.cos(arg), np.sin(arg))
        a[j:j + block] = (modes * (w * fx)[None, :]).sum(axis=1) * INV_SQRT_PI
    return SpectralCoefficients(k_max, a)
