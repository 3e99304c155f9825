"""Invariant battery: every module's structural properties as named checks.

Each check returns a CheckResult with the measured value and the threshold it
was held to, so the CLI can emit machine-readable pass/fail lines.  Checks are
deterministic given the seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import charge as chg
from . import control as ctl
from . import greens, oracles, propagator, spectral
from .kernels import discrete_h1_norm, fit_loglog_slope, odd_eigenvalues, segment_moments
from .spectral import SpectralCoefficients, TimeGrid


@dataclass(frozen=True)
class CheckResult:
    module: str
    name: str
    passed: bool
    measured: float
    threshold: float
    comparator: str = "<="
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = (f"{status} {self.module}.{self.name} measured={self.measured:.6e} "
               f"{self.comparator} {self.threshold:.6e}")
        return out + (f"  [{self.detail}]" if self.detail else "")


def _result(module, name, measured, threshold, comparator="<=", detail=""):
    if comparator == "<=":
        ok = measured <= threshold
    else:
        ok = measured >= threshold
    return CheckResult(module, name, bool(ok), float(measured), float(threshold),
                       comparator, detail)


# ---------------------------------------------------------------- spectral

def check_orthonormality(k_max, seed):
    n_modes, samples = 64, 4096
    xs = np.linspace(-np.pi, np.pi, samples + 1)
    w = np.full(xs.size, 2 * np.pi / samples)
    w[0] *= 0.5
    w[-1] *= 0.5
    modes = np.array([spectral.eigenmode_value(k, xs) for k in range(1, n_modes + 1)])
    gram = (modes * w) @ modes.T
    dev = float(np.max(np.abs(gram - np.eye(n_modes))))
    return _result("spectral", "orthonormality", dev, 1e-10)


def check_parseval(k_max, seed):
    rng = np.random.default_rng(seed)
    k_use = 64
    c = SpectralCoefficients(k_use, rng.standard_normal(k_use) + 1j * rng.standard_normal(k_use))
    samples = 8192
    xs = np.linspace(-np.pi, np.pi, samples + 1)
    w = np.full(xs.size, 2 * np.pi / samples)
    w[0] *= 0.5
    w[-1] *= 0.5
    vals = spectral.evaluate_state(c, xs)
    quad = float(np.sum(w * np.abs(vals) ** 2))
    dev = abs(quad - c.norm() ** 2)
    return _result("spectral", "parseval", dev, 1e-8)


def check_free_evolve_group(k_max, seed):
    # exact per-entry phase product; the float bound is set by the rounding of
    # the phase arguments lam_k*(t+s), a few ulps of the largest phase
    rng = np.random.default_rng(seed + 1)
    c = SpectralCoefficients(k_max, rng.standard_normal(k_max) + 1j * rng.standard_normal(k_max))
    eps = np.finfo(float).eps
    lam_max = spectral.eigenvalue(k_max)
    worst = 0.0
    for _ in range(10):
        t, s = rng.uniform(0, 10, size=2)
        one = spectral.free_evolve(c, t + s)
        two = spectral.free_evolve(spectral.free_evolve(c, t), s)
        bound = 8.0 * eps * max(1.0, lam_max * (t + s))
        dev = float(np.max(np.abs(one.a - two.a) / np.abs(c.a)))
        worst = max(worst, dev / bound)
    return _result("spectral", "free-evolve-group", worst, 1.0,
                   detail="relative error over 8*eps*lam_max*(t+s) phase-rounding bound")


def check_origin_trace_series(k_max, seed):
    rng = np.random.default_rng(seed + 2)
    c = SpectralCoefficients(k_max, rng.standard_normal(k_max) + 1j * rng.standard_normal(k_max))
    ts = rng.uniform(0, 20, size=10)
    series = spectral.free_origin_series(c, ts)
    direct = np.array([spectral.origin_trace(spectral.free_evolve(c, t)) for t in ts])
    dev = float(np.max(np.abs(series - direct)))
    return _result("spectral", "origin-trace-series", dev, 1e-12)


# ---------------------------------------------------------------- greens

def check_series_closed_order(k_max, seed):
    rng = np.random.default_rng(seed + 3)
    pts = [(rng.uniform(-3, 3), rng.uniform(-3, 3),
            complex(rng.uniform(0.1, 5), rng.uniform(-2, 2))) for _ in range(20)]
    ks = (1000, 10000, 100000)
    medians = []
    for kk in ks:
        errs = [abs(greens.green_series(x, xp, z, kk) - greens.green_closed(x, xp, z))
                for x, xp, z in pts]
        medians.append(float(np.median(errs)))
    slope = -fit_loglog_slope(ks, medians)
    return _result("greens", "series-closed-order", slope, 0.9, ">=",
                   detail=f"median errors {medians}")


def check_derivative_jump(k_max, seed):
    rng = np.random.default_rng(seed + 4)
    worst = 0.0
    h = 1e-5
    for _ in range(5):
        xp = rng.uniform(-2.0, 2.0)
        z = complex(rng.uniform(0.3, 3.0), 0)
        g = lambda x: greens.green_closed(x, xp, z)
        right = (-3 * g(xp) + 4 * g(xp + h) - g(xp + 2 * h)) / (2 * h)
        left = (3 * g(xp) - 4 * g(xp - h) + g(xp - 2 * h)) / (2 * h)
        worst = max(worst, abs((right - left) + 1.0))
    return _result("greens", "derivative-jump", worst, 1e-6)


def check_pole_bracketing(k_max, seed):
    # green_origin(-E) must flip sign across every odd-sector pole, and the
    # root finder must place exactly one even root per inter-pole gap
    measured = -1.0
    for j in (1, 3, 5, 7):
        lam = 0.25 * j * j
        lo = greens.green_origin_real(lam - 1e-3)
        hi = greens.green_origin_real(lam + 1e-3)
        measured = max(measured, float(np.sign(lo) * np.sign(hi)))
    for alpha in (0.7, -1.3):
        eigs = [e for e, s in greens.static_eigenvalues(alpha, (0.3, 20.0)) if s == "even"]
        for j in (1, 3, 5):
            a, b = 0.25 * j * j, 0.25 * (j + 2) * (j + 2)
            if len([e for e in eigs if a < e < b]) != 1:
                measured = 1.0
    return _result("greens", "pole-bracketing", measured, -1.0,
                   comparator="<=", detail="sign flip across poles, one root per gap")


def check_fd_oracle(k_max, seed):
    worst = 0.0
    for alpha in (-2.0, -0.5, 0.5, 2.0):
        mine = [e for e, _ in greens.static_eigenvalues(alpha, (-10.0, 10.0))][:3]
        ref = oracles.fd_spectrum(alpha, n_eigen=3)
        worst = max(worst, float(np.max(np.abs(np.array(mine) - ref))))
    return _result("greens", "fd-oracle", worst, 1e-3)


# ---------------------------------------------------------------- charge

def _bump_run(k_max_run, n_steps, t_end=2.0, amplitude=0.5):
    grid = TimeGrid(t_end, n_steps)
    psi0 = SpectralCoefficients.unit(1, k_max_run)
    alpha = chg.CouplingProfile.sine_bump(amplitude, t_end)
    return grid, psi0, alpha


def check_dt_self_convergence(k_max, seed):
    k_use = 25  # all retained mode periods resolved on the coarsest grid
    _, psi0, alpha = _bump_run(k_use, 500)
    ref = chg.solve_charge(alpha, psi0, TimeGrid(2.0, 16000), k_use)
    dts, errs = [4e-3, 2e-3, 1e-3], []
    for dt in dts:
        n = int(round(2.0 / dt))
        tr = chg.solve_charge(alpha, psi0, TimeGrid(2.0, n), k_use)
        errs.append(float(np.max(np.abs(tr.q - ref.q[:: 16000 // n]))))
    slope = fit_loglog_slope(dts, errs)
    return _result("charge", "dt-self-convergence", slope, 1.9, ">=",
                   detail=f"errors {errs}")


def check_kmax_truncation(k_max, seed):
    grid = TimeGrid(2.0, 1000)
    alpha = chg.CouplingProfile.sine_bump(0.5, 2.0)
    qs = {}
    ks = [51, 101, 201, 401]
    for kk in ks:
        qs[kk] = chg.solve_charge(alpha, SpectralCoefficients.unit(1, kk), grid, kk).q
    diffs = [float(np.max(np.abs(qs[a] - qs[b]))) for a, b in zip(ks[:-1], ks[1:])]
    slope = fit_loglog_slope(ks[:-1], diffs)
    ok_monotone = all(d2 < d1 for d1, d2 in zip(diffs[:-1], diffs[1:]))
    measured = slope if ok_monotone else 0.0
    return _result("charge", "kmax-truncation-decay", measured, -1.0, "<=",
                   detail=f"sup diffs on doubling {diffs}")


def check_u_zero_at_start(k_max, seed):
    rng = np.random.default_rng(seed + 5)
    grid = TimeGrid(1.0, 64)
    q = rng.standard_normal(65) + 1j * rng.standard_normal(65)
    traj = chg.ChargeTrajectory(grid, q, 51)
    val = abs(chg.apply_U(traj)[0])
    return _result("charge", "u-zero-at-start", val, 0.0)


def check_u_integration_by_parts(k_max, seed):
    # integrated form (with the q(0) boundary term) against the direct
    # per-mode quadrature of the raw causal integrals, on a smooth charge
    grid = TimeGrid(1.5, 600)
    ts = grid.times
    q = np.sin(1.3 * ts) * np.exp(0.4j * ts) + 0.7 - 0.2j
    traj = chg.ChargeTrajectory(grid, q, 101)
    integrated = chg.apply_U(traj, analytic_tail=False)
    direct = np.zeros(ts.size, dtype=complex)
    for lam_k in odd_eigenvalues(101):
        c_nodes = np.concatenate(([0.0], np.cumsum(segment_moments(q, grid.dt, lam_k))))
        direct += np.exp(-1j * lam_k * ts) * c_nodes
    dev = float(np.max(np.abs(integrated - direct)))
    return _result("charge", "u-integration-by-parts", dev, 1e-12)


def check_u_constant_analytic(k_max, seed):
    grid = TimeGrid(1.0, 400)
    traj = chg.ChargeTrajectory(grid, np.ones(401, dtype=complex), 51)
    got = chg.apply_U(traj, analytic_tail=False)
    lam = odd_eigenvalues(51)
    t = grid.times[:, None]
    exact = np.sum((1 - np.exp(-1j * lam[None, :] * t)) / (1j * lam[None, :]), axis=1)
    exact[0] = 0.0
    dev = float(np.max(np.abs(got - exact)))
    # independent trapezoid cross-check on the first 50 modes
    fine = TimeGrid(1.0, 32000)
    trap = np.zeros(fine.times.size, dtype=complex)
    for lam_k in odd_eigenvalues(99):
        ph = np.exp(1j * lam_k * fine.times)
        pre = np.concatenate(([0.0], np.cumsum(0.5 * fine.dt * (ph[1:] + ph[:-1]))))
        trap += np.conj(ph) * pre
    exact_fine = np.sum(
        (1 - np.exp(-1j * odd_eigenvalues(99)[None, :] * fine.times[:, None]))
        / (1j * odd_eigenvalues(99)[None, :]), axis=1)
    dev_trap = float(np.max(np.abs(trap - exact_fine)))
    return _result("charge", "u-constant-analytic", max(dev, 0.0), 1e-10,
                   detail=f"trapezoid cross-check dev {dev_trap:.2e}")


def check_u_linearity(k_max, seed):
    rng = np.random.default_rng(seed + 6)
    grid = TimeGrid(1.0, 128)
    q1 = rng.standard_normal(129) + 1j * rng.standard_normal(129)
    q2 = rng.standard_normal(129) + 1j * rng.standard_normal(129)
    u1 = chg.apply_U(chg.ChargeTrajectory(grid, q1, 101))
    u2 = chg.apply_U(chg.ChargeTrajectory(grid, q2, 101))
    u12 = chg.apply_U(chg.ChargeTrajectory(grid, q1 + q2, 101))
    dev = float(np.max(np.abs(u12 - u1 - u2)))
    return _result("charge", "u-linearity", dev, 1e-12)


def check_conjugation_reversal(k_max, seed):
    # for real alpha and real-coefficient psi0, conj(q) solves the equation
    # with the conjugated (time-reversed) kernel; the reversed solve goes
    # through the independent Picard path
    rng = np.random.default_rng(seed + 7)
    k_use = 25
    grid = TimeGrid(1.0, 1000)
    fgrid = TimeGrid(1.0, 4000)
    alpha = chg.CouplingProfile.sine_bump(0.4, 1.0)
    worst = 0.0
    for _ in range(5):
        a = np.zeros(k_use, dtype=complex)
        a[0::2] = rng.standard_normal((k_use + 1) // 2) / np.arange(1, k_use + 1, 2) ** 2
        psi0 = SpectralCoefficients(k_use, a)
        traj = chg.solve_charge(alpha, psi0, grid, k_use)
        src = spectral.free_origin_series(psi0, fgrid.times)
        av = np.real(alpha.values_on(fgrid))
        q_rev = oracles.picard_charge(np.conj(-av * src), av.astype(complex),
                                      np.conj(-av[0] * spectral.origin_trace(psi0)),
                                      0.0, greens.SpectralShift(), fgrid, k_use,
                                      kernel_sign=+1.0)
        worst = max(worst, float(np.max(np.abs(np.conj(traj.q) - q_rev[::4]))))
    return _result("charge", "conjugation-reversal", worst, 1e-5)


def check_large_amplitude(k_max, seed):
    grid = TimeGrid(1.0, 1000)
    psi0 = SpectralCoefficients.unit(1, 101)
    for profile in (chg.CouplingProfile.constant(10.0, 1.0),
                    chg.CouplingProfile.sine_bump(10.0, 1.0)):
        traj = chg.solve_charge(profile, psi0, grid, 101)
        if not np.all(np.isfinite(traj.q.real)):
            return _result("charge", "large-amplitude-wellposed", 1.0, 0.0)
    return _result("charge", "large-amplitude-wellposed", 0.0, 0.0,
                   detail="no step singularity for A=10, dt=1e-3")


def check_picard_oracle(k_max, seed):
    k_use = 25
    grid, psi0, alpha = _bump_run(k_use, 2000)
    traj = chg.solve_charge(alpha, psi0, grid, k_use)
    fgrid = TimeGrid(2.0, 8000)
    src = spectral.free_origin_series(psi0, fgrid.times)
    av = np.real(alpha.values_on(fgrid))
    q_oracle = oracles.picard_charge(-av * src, av.astype(complex),
                                     -av[0] * spectral.origin_trace(psi0), 0.0,
                                     greens.SpectralShift(), fgrid, k_use)
    dev = float(np.max(np.abs(traj.q - q_oracle[::4])))
    return _result("charge", "picard-oracle", dev, 1e-6)


def check_general_scheme_picard(k_max, seed):
    # generic (f, phi) pair for the charge-like scheme, against the same
    # fixed-point oracle on a 4x finer grid
    k_use = 15
    grid = TimeGrid(2.0, 2000)
    shift = greens.SpectralShift()
    f = lambda t: np.exp(-0.3 * t) * (1.2 + 0.5j * np.sin(2 * t))
    phi = chg.CouplingProfile.sine_bump(0.8, 2.0)
    traj = chg.solve_charge_general(f, phi, shift, grid, k_use)
    fgrid = TimeGrid(2.0, 8000)
    v0 = chg.initial_charge(f(0.0), 0.0, shift)
    q_oracle = oracles.picard_charge(f(fgrid.times), np.real(phi.values_on(fgrid)).astype(complex),
                                     v0, v0, shift, fgrid, k_use)
    dev = float(np.max(np.abs(traj.q - q_oracle[::4])))
    return _result("charge", "general-scheme-picard", dev, 1e-6)


# ---------------------------------------------------------------- propagator

def check_galerkin_ode_oracle(k_max, seed):
    # the full charge+assembly pipeline against direct adaptive ODE
    # integration of the equivalent truncated mode system
    k_use = 25
    grid, psi0, alpha = _bump_run(k_use, 2000)
    res = propagator.evolve(psi0, alpha, grid, k_use, store_every=None)
    ref = oracles.galerkin_evolution(psi0.a, lambda t: alpha.value(t), grid.t_end, k_use)
    dev = float(np.max(np.abs(res.final_state.a - ref)))
    return _result("propagator", "galerkin-ode-oracle", dev, 1e-6)


def check_unitarity_dt_order(k_max, seed):
    k_use = 25
    dts, drifts = [4e-3, 2e-3, 1e-3], []
    for dt in dts:
        grid, psi0, alpha = _bump_run(k_use, int(round(2.0 / dt)))
        res = propagator.evolve(psi0, alpha, grid, k_use, store_every=None)
        drifts.append(res.norm_drift())
    slope = fit_loglog_slope(dts, drifts)
    return _result("propagator", "unitarity-dt-order", slope, 1.9, ">=",
                   detail=f"drifts {drifts}")


def check_unitarity_kmax_bound(k_max, seed):
    # the truncation contribution to the norm drift sits below the dt^2 floor
    # at every k_max (the tail-corrected truncated system is effectively a
    # projected self-adjoint dynamics), so the k_max branch of the tolerance
    # is asserted as a uniform bound rather than a measurable decay order
    ks, drifts = [5, 25, 101, 401], []
    for kk in ks:
        grid, psi0, alpha = _bump_run(kk, 4000, t_end=1.0)
        res = propagator.evolve(psi0, alpha, grid, kk, store_every=None)
        drifts.append(res.norm_drift())
    return _result("propagator", "unitarity-kmax-bound", max(drifts), 1e-8,
                   detail=f"drifts over k_max {ks}: {drifts}")


def check_mild_odd_support(k_max, seed):
    grid, psi0, alpha = _bump_run(101, 500, t_end=1.0)
    res = propagator.evolve(psi0, alpha, grid, 101, store_every=50)
    worst = 0.0
    for idx, state in zip(res.snapshot_indices, res.snapshots):
        free = spectral.free_evolve(psi0, grid.times[idx])
        diff = state.a - free.a
        worst = max(worst, float(np.max(np.abs(diff[1::2]))))
    return _result("propagator", "mild-odd-support", worst, 0.0)


def check_boundary_equivalence(k_max, seed):
    grid = TimeGrid(1.0, 1000)
    psi0 = SpectralCoefficients.unit(1, k_max)
    alpha = chg.CouplingProfile.sine_bump(1.0, 1.0)
    res = propagator.evolve(psi0, alpha, grid, k_max, store_every=None)
    return _result("propagator", "boundary-equivalence", res.max_boundary_residual(), 1e-8)


def check_phi4_identity(k_max, seed):
    # -d2/dx2[F(w,t) - w(t)G] = i F(w',t) + lam w(t) G, coefficientwise, for
    # piecewise-linear w with w(0)=0; also pins the (lam_k + lam) sign of the
    # Green-difference expansion
    rng = np.random.default_rng(seed + 8)
    k_use = 101
    shift = greens.SpectralShift()
    green = greens.green_coefficients(shift, k_use)
    lam_all = spectral.eigenvalues(k_use)
    worst = 0.0
    for _ in range(5):
        grid = TimeGrid(1.0, 200)
        w = rng.standard_normal(201) + 1j * rng.standard_normal(201)
        w[0] = 0.0
        traj = chg.ChargeTrajectory(grid, w, k_use)
        t_end = grid.t_end
        f_w = propagator.assemble_F(traj, t_end)
        # F(w', t): slope-integrated accumulators give the derivative transform
        lam_odd = odd_eigenvalues(k_use)
        fprime = np.zeros(k_use, dtype=complex)
        from .kernels import slope_moments as _sm
        for pos, lam_k in enumerate(lam_odd):
            b = np.sum(_sm(w, grid.dt, lam_k))
            fprime[2 * pos] = 1j / np.sqrt(np.pi) * np.exp(-1j * lam_k * t_end) * b
        lhs = lam_all * (f_w.a - w[-1] * green.a)
        rhs = 1j * fprime + shift.lam * w[-1] * green.a
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return _result("propagator", "phi4-identity", worst, 1e-8)


def check_green_difference_sign(k_max, seed):
    # Q(t) = (e^{itLap}-1)G + F(1,t) expands with denominator lam_k(lam_k + lam);
    # the (lam_k - lam) variant does not match
    k_use = 101
    shift = greens.SpectralShift()
    green = greens.green_coefficients(shift, k_use)
    grid = TimeGrid(1.3, 500)
    t_end = grid.t_end
    traj = chg.ChargeTrajectory(grid, np.ones(501, dtype=complex), k_use)
    f_one = propagator.assemble_F(traj, t_end)
    lam_odd = odd_eigenvalues(k_use)
    phase = np.exp(-1j * lam_odd * t_end)
    direct = (phase - 1.0) * green.a[0::2] + f_one.a[0::2]
    plus = (1 - phase) * shift.lam / (lam_odd * (lam_odd + shift.lam)) / np.sqrt(np.pi)
    minus = (1 - phase) * shift.lam / (lam_odd * (lam_odd - shift.lam)) / np.sqrt(np.pi)
    dev_plus = float(np.max(np.abs(direct - plus)))
    dev_minus = float(np.max(np.abs(direct - minus)))
    return _result("propagator", "green-difference-sign", dev_plus, 1e-12,
                   detail=f"(lam+lam0) matches; (lam-lam0) deviates by {dev_minus:.2e}")


def check_eigenstate_rotation(k_max, seed):
    alpha_c = 0.5
    energy = [e for e, s in greens.static_eigenvalues(alpha_c, (0.26, 2.25)) if s == "even"][0]
    lam_odd = odd_eigenvalues(k_max)
    a = np.zeros(k_max, dtype=complex)
    a[0::2] = 1.0 / (np.sqrt(np.pi) * (lam_odd - energy))
    state = SpectralCoefficients(k_max, a)
    state = state.scaled(1.0 / state.norm())
    ds = propagator.decompose(state, -alpha_c * spectral.origin_trace(state))
    grid = TimeGrid(1.0, 1000)
    res = propagator.evolve(ds, chg.CouplingProfile.constant(alpha_c, 1.0), grid, k_max,
                            store_every=None)
    final = res.final_state
    overlap = np.vdot(state.a, final.a)
    fidelity_defect = abs(1.0 - abs(overlap) / (state.norm() * final.norm()))
    vec_err = float(np.linalg.norm(final.a - np.exp(-1j * energy * grid.t_end) * state.a))
    return _result("propagator", "eigenstate-rotation", max(fidelity_defect, vec_err), 1e-5,
                   detail=f"fidelity defect {fidelity_defect:.2e}, vector err {vec_err:.2e}")


def check_hamiltonian_eigenstate(k_max, seed):
    alpha_c = -1.5
    energy = [e for e, s in greens.static_eigenvalues(alpha_c, (0.26, 2.25)) if s == "even"][0]
    lam_odd = odd_eigenvalues(k_max)
    a = np.zeros(k_max, dtype=complex)
    a[0::2] = 1.0 / (np.sqrt(np.pi) * (lam_odd - energy))
    state = SpectralCoefficients(k_max, a)
    scale = 1.0 / state.norm()
    state = state.scaled(scale)
    ds = propagator.decompose(state, scale)  # q = 1 before normalization
    out = propagator.apply_hamiltonian(ds)
    dev = float(np.max(np.abs(out.a - energy * state.a)))
    return _result("propagator", "hamiltonian-eigenstate", dev, 1e-6)


def check_regular_tail(k_max, seed):
    grid, psi0, alpha = _bump_run(k_max, 2000)
    res = propagator.evolve(psi0, alpha, grid, k_max, store_every=None)
    q_end = res.charge.q[-1]
    ds = propagator.decompose(res.final_state, q_end)
    cuts = sorted({max(2, k_max // 8), max(3, k_max // 4), max(4, k_max // 2)})
    tails = [ds.h2_tail(c) for c in cuts]
    slope = fit_loglog_slope(cuts, tails)
    ok = all(t2 < t1 for t1, t2 in zip(tails[:-1], tails[1:]))
    return _result("propagator", "regular-part-h2-tail", slope if ok else 0.0, -1.0, "<=",
                   detail=f"tails {tails}")


def check_energy_constant(k_max, seed):
    alpha_c = 0.5
    energy = [e for e, s in greens.static_eigenvalues(alpha_c, (0.26, 2.25)) if s == "even"][0]
    lam_odd = odd_eigenvalues(k_max)
    a = np.zeros(k_max, dtype=complex)
    a[0::2] = 1.0 / (np.sqrt(np.pi) * (lam_odd - energy))
    state = SpectralCoefficients(k_max, a)
    state = state.scaled(1.0 / state.norm())
    ds = propagator.decompose(state, -alpha_c * spectral.origin_trace(state))
    alpha = chg.CouplingProfile.constant(alpha_c, 1.0)
    res = propagator.evolve(ds, alpha, TimeGrid(1.0, 1000), k_max, store_every=None)
    rep = propagator.diagnostics(res, alpha)
    return _result("propagator", "energy-constant-static", rep.energy_drift, 1e-5)


def check_energy_balance(k_max, seed):
    grid, psi0, alpha = _bump_run(k_max, 2000)
    res = propagator.evolve(psi0, alpha, grid, k_max, store_every=None)
    rep = propagator.diagnostics(res, alpha)
    return _result("propagator", "energy-balance", rep.energy_balance_relative, 1e-3)


# ---------------------------------------------------------------- control

def check_linearized_linearity(k_max, seed):
    rng = np.random.default_rng(seed + 9)
    grid = TimeGrid(1.0, 500)
    k_use = 101
    psi0 = SpectralCoefficients.unit(1, k_use)
    alpha = chg.CouplingProfile.sine_bump(0.3, 1.0)
    base = chg.solve_charge(alpha, psi0, grid, k_use)
    t = grid.times
    u1 = np.sin(np.pi * t) * (1 + 0.5j)
    u2 = np.sin(2 * np.pi * t) * (0.3 - 0.2j) + np.sin(np.pi * t)
    d1 = ctl.apply_linearized(alpha, u1, psi0, grid, k_use, base_charge=base)
    d2 = ctl.apply_linearized(alpha, u2, psi0, grid, k_use, base_charge=base)
    d12 = ctl.apply_linearized(alpha, u1 + u2, psi0, grid, k_use, base_charge=base)
    dev = d12.sub(d1.add(d2)).norm()
    return _result("control", "linearized-linearity", dev, 1e-10)


def check_sector_closure(k_max, seed):
    grid = TimeGrid(1.0, 500)
    k_use = 101
    a = np.zeros(k_use, dtype=complex)
    a[0] = 0.8
    a[2] = 0.6
    psi0 = SpectralCoefficients(k_use, a)
    alpha = chg.CouplingProfile.sine_bump(0.4, 1.0)
    final = ctl.gamma(alpha, psi0, grid, k_use)
    lin = ctl.apply_linearized(alpha, np.sin(np.pi * grid.times) + 0j, psi0, grid, k_use)
    dev = max(final.even_sector_defect(), lin.even_sector_defect())
    return _result("control", "even-sector-closure", dev, 0.0)


def check_moment_exactness(k_max, seed):
    rng = np.random.default_rng(seed + 10)
    t_end = 8.0 * np.pi
    fine = TimeGrid(t_end, 1 << 19)
    worst = 0.0
    kk = np.arange(1, k_max + 1, 2)
    for _ in range(10):
        c = np.zeros(k_max, dtype=complex)
        c[0::2] = kk ** -3.0 * np.exp(2j * np.pi * rng.random(kk.size))
        target = ctl.ControlTarget(SpectralCoefficients(k_max, c), t_end)
        rho = ctl.solve_moment(target, fine)
        worst = max(worst, ctl.moment_residual(rho, target))
    return _result("control", "moment-exactness", worst, 1e-8)


def check_gateaux_continuity(k_max, seed):
    rng = np.random.default_rng(seed + 11)
    grid = TimeGrid(1.0, 500)
    k_use = 101
    psi0 = SpectralCoefficients.unit(1, k_use)
    t = grid.times
    us = []
    for _ in range(10):
        coeffs = rng.standard_normal(3)
        u = sum(c * np.sin((j + 1) * np.pi * t) for j, c in enumerate(coeffs))
        us.append(u / discrete_h1_norm(u, grid.dt))
    base_amp = 0.3
    gaps = [0.2, 0.1, 0.05]
    sups = []
    for gap in gaps:
        a1 = chg.CouplingProfile.sine_bump(base_amp, 1.0)
        a2 = chg.CouplingProfile.sine_bump(base_amp + gap, 1.0)
        b1 = chg.solve_charge(a1, psi0, grid, k_use)
        b2 = chg.solve_charge(a2, psi0, grid, k_use)
        worst = 0.0
        for u in us:
            d1 = ctl.apply_linearized(a1, u + 0j, psi0, grid, k_use, base_charge=b1)
            d2 = ctl.apply_linearized(a2, u + 0j, psi0, grid, k_use, base_charge=b2)
            worst = max(worst, d1.sub(d2).norm())
        sups.append(worst)
    monotone = all(s2 < s1 for s1, s2 in zip(sups[:-1], sups[1:]))
    return _result("control", "gateaux-continuity", 0.0 if monotone else 1.0, 0.0,
                   detail=f"operator gaps {sups}")


def check_frechet_order(k_max, seed):
    rng = np.random.default_rng(seed + 12)
    grid = TimeGrid(2.0, 1000)
    k_use = 101
    psi0 = SpectralCoefficients.unit(1, k_use)
    t = grid.times
    u = np.sin(np.pi * t / 2.0) + 0.4 * np.sin(np.pi * t)
    u = u / discrete_h1_norm(u, grid.dt)
    worst_slope = np.inf
    for base in (chg.CouplingProfile.zero(2.0), chg.CouplingProfile.sine_bump(0.3, 2.0)):
        g0 = ctl.gamma(base, psi0, grid, k_use)
        d = ctl.apply_linearized(base, u + 0j, psi0, grid, k_use)
        eps_list, rems = [1e-1, 1e-2, 1e-3], []
        for eps in eps_list:
            vals = np.real(np.atleast_1d(base.values_on(grid))) + eps * u
            pert = chg.CouplingProfile.piecewise_linear(grid, vals + 0j)
            rems.append(ctl.gamma(pert, psi0, grid, k_use).sub(g0).sub(d.scaled(eps)).norm())
        worst_slope = min(worst_slope, fit_loglog_slope(eps_list, rems))
    return _result("control", "frechet-order", worst_slope, 1.9, ">=")


def check_lipschitz_ratio(k_max, seed):
    grid = TimeGrid(2.0, 1000)
    k_use = 101
    psi0 = SpectralCoefficients.unit(1, k_use)
    amps = [0.08, 0.10, 0.12, 0.14, 0.16]
    ratios = []
    for amp in amps:
        a = chg.CouplingProfile.sine_bump(amp, 2.0)
        b = chg.CouplingProfile.sine_bump(amp * 1.001, 2.0)
        dq, da = chg.lipschitz_probe(a, b, psi0, grid, k_use)
        ratios.append(dq / da)
    return _result("control", "lipschitz-ratio", max(ratios), 10.0,
                   detail=f"ratios {ratios}")


_CHECK_MODULES = {
    "spectral": [
        check_orthonormality,
        check_parseval,
        check_free_evolve_group,
        check_origin_trace_series,
    ],
    "greens": [
        check_series_closed_order,
        check_derivative_jump,
        check_pole_bracketing,
        check_fd_oracle,
    ],
    "charge": [
        check_dt_self_convergence,
        check_kmax_truncation,
        check_u_zero_at_start,
        check_u_integration_by_parts,
        check_u_constant_analytic,
        check_u_linearity,
        check_conjugation_reversal,
        check_large_amplitude,
        check_picard_oracle,
        check_general_scheme_picard,
    ],
    "propagator": [
        check_galerkin_ode_oracle,
        check_unitarity_dt_order,
        check_unitarity_kmax_bound,
        check_mild_odd_support,
        check_boundary_equivalence,
        check_phi4_identity,
        check_green_difference_sign,
        check_eigenstate_rotation,
        check_hamiltonian_eigenstate,
        check_regular_tail,
        check_energy_constant,
        check_energy_balance,
    ],
    "control": [
        check_linearized_linearity,
        check_sector_closure,
        check_moment_exactness,
        check_gateaux_continuity,
        check_frechet_order,
        check_lipschitz_ratio,
    ],
}

CHECKS = [fn for fns in _CHECK_MODULES.values() for fn in fns]


def run_checks(module_filter: str | None = None, k_max: int = spectral.DEFAULT_K_MAX,
               seed: int = 20260809) -> list[CheckResult]:
    if module_filter is not None and module_filter not in _CHECK_MODULES:
        from .errors import InputError

        raise InputError(f"unknown module filter {module_filter!r}; "
                         f"choose from {sorted(_CHECK_MODULES)}")
    results = []
    for module, fns in _CHECK_MODULES.items():
        if module_filter and module != module_filter:
            continue
        for fn in fns:
            name = fn.__name__.removeprefix("check_").replace("_", "-")
            try:
                res = fn(k_max, seed)
            except Exception as exc:  # a crashed check is a failed check
                res = CheckResult(module, name, False, float("nan"), 0.0, "<=",
                                  f"error: {exc}")
            results.append(res)
    return results


def elapsed_run(module_filter=None, k_max=spectral.DEFAULT_K_MAX, seed=20260809):
    t0 = time.time()
    results = run_checks(module_filter, k_max, seed)
    return results, time.time() - t0
