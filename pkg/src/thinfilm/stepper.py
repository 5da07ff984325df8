"""Implicit variational time stepping for the regularized thin-film problem.

One step from h solves, for every test mode psi in the truncated space,

    int v_x psi_x + tau int a v_xxx psi_xxx + (int v)(int psi)
        = int h_x psi_x + (int h)(int psi) + tau int a g psi_xxx

with a = f_eps(w), g = (I w)_x frozen at a source state w. The default
takes w = h (one linear solve per step); Picard mode iterates w.
With w = h the stabilizing part is implicit and the nonlocal part
explicit, which makes the step a convex splitting of the energy.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg

from . import functionals as fn
from .mobility import MobilityModel
from .spectral import (CosineField, GridSpec, apply_I, derivative, seminorm_Hs,
                       sin_matrix)

log = logging.getLogger(__name__)


class StepFailure(RuntimeError):
    """A single step could not be completed at the requested tau."""


class PicardNotConverged(StepFailure):
    pass


class RunAborted(RuntimeError):
    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True, eq=False)
class StepSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    tau: float
    frozen_a: np.ndarray
    frozen_g: np.ndarray


@dataclass(frozen=True)
class StepReport:
    accepted: bool
    picard_iters: int
    tau_used: float
    snapshot: fn.DiagnosticSnapshot
    estim_stat_ok: bool
    energy_monitor_ok: bool = True
    entropy_monitor_ok: bool = True
    lyapunov_ok: bool = True
    corridor_ok: bool = True
    stagnated: bool = False
    estim_stat_gap: float = 0.0

    @property
    def monitors_ok(self) -> bool:
        return (self.estim_stat_ok and self.energy_monitor_ok and self.entropy_monitor_ok
                and self.lyapunov_ok and self.corridor_ok)


_MONITOR_FLAGS = {
    "estim_stat": "estim_stat_ok",
    "energy": "energy_monitor_ok",
    "entropy": "entropy_monitor_ok",
    "lyapunov": "lyapunov_ok",
    "corridor": "corridor_ok",
}


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    model: MobilityModel
    initial: object  # CosineField or anything with .build(grid)
    tau0: float = 1e-3
    t_end: float = 1.0
    picard_max: int = 1
    picard_tol: float = 1e-10
    stat_slack: float = 1e-6
    monitor_slack: float = 5e-2
    tau_floor: float = 1e-9
    restore_after: int = 10
    enforce: tuple = ("estim_stat", "energy", "entropy", "lyapunov")
    cap_policy: str = "fixed"
    output: str = ""

    def __post_init__(self):
        if not self.tau0 > 0:
            raise ValueError("tau0 must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.picard_tol > 0:
            raise ValueError("picard_tol must be positive")
        if self.picard_max < 1:
            raise ValueError("picard_max must be >= 1")
        unknown = set(self.enforce) - set(_MONITOR_FLAGS)
        if unknown:
            raise ValueError(f"unknown monitors {sorted(unknown)}")

    def initial_field(self) -> CosineField:
        u0 = self.initial
        if isinstance(u0, CosineField):
            if u0.grid != self.grid:
                raise ValueError("initial field grid differs from config grid")
            return u0
        return u0.build(self.grid)


def picard_time_scale(model: MobilityModel) -> float:
    """1/(2 M C_eps) with the sharp spectral C_eps = M/(4 eps).

    C_eps is the smallest constant with
    |(Iu)_x|^2 <= 2 C_eps |Iu|^2 + eps/(2M) |(Iu)_xx|^2 mode by mode.
    """
    c_eps = model.cap_M / (4.0 * model.eps)
    return 1.0 / (2.0 * model.cap_M * c_eps)


def default_cap(u0: CosineField, n: float) -> float:
    """M = f(2 (max|u0| + mass + 1))."""
    return (2.0 * (float(np.max(np.abs(u0.values))) + abs(u0.mass) + 1.0)) ** n


def _third_derivative_basis(grid: GridSpec) -> np.ndarray:
    return sin_matrix(grid) * grid.wavenumbers[1:] ** 3


def assemble_step(u_prev: CosineField, a_source: CosineField, tau: float,
                  model: MobilityModel) -> StepSystem:
    if not tau > 0:
        raise ValueError("tau must be positive")
    grid = u_prev.grid
    lam = grid.wavenumbers**2
    a = model.f_eps(a_source.values)
    g = derivative(apply_I(a_source), 1).values
    s3 = _third_derivative_basis(grid)
    w = grid.weight
    n1 = grid.n_modes + 1
    K = np.zeros((n1, n1))
    K[0, 0] = 1.0
    K[1:, 1:] = tau * w * (s3.T @ (a[:, None] * s3))
    K[1:, 1:] += np.diag(lam[1:])
    K[1:, 1:] = 0.5 * (K[1:, 1:] + K[1:, 1:].T)
    rhs = np.empty(n1)
    rhs[0] = u_prev.coeffs[0]
    rhs[1:] = lam[1:] * u_prev.coeffs[1:] + tau * w * (s3.T @ (a * g))
    return StepSystem(K, rhs, tau, a, g)


def solve_system(system: StepSystem, h0: float) -> np.ndarray:
    """Solve the mode-1..N block by Jacobi-scaled Cholesky; c_0 = h0 exactly."""
    K = system.matrix[1:, 1:]
    diag = np.diag(K)
    if not np.all(diag > 0):
        raise StepFailure("step matrix has a non-positive diagonal entry")
    d = 1.0 / np.sqrt(diag)
    try:
        factor = linalg.cho_factor(d[:, None] * K * d[None, :], check_finite=True)
    except linalg.LinAlgError as exc:
        raise StepFailure("step matrix is not positive definite") from exc
    y = linalg.cho_solve(factor, d * system.rhs[1:])
    c = np.empty_like(system.rhs)
    c[0] = h0
    c[1:] = d * y
    return c


def estim_stat(v: CosineField, h: CosineField, system: StepSystem):
    """(lhs, rhs) of 1/2|v_x|^2 + tau int a v_xxx^2 <= 1/2|h_x|^2 + tau int a g v_xxx."""
    vxxx = derivative(v, 3).values
    w = v.grid.weight
    a, g, tau = system.frozen_a, system.frozen_g, system.tau
    lhs = 0.5 * seminorm_Hs(v, 1.0) + tau * w * np.sum(a * vxxx * vxxx)
    rhs = 0.5 * seminorm_Hs(h, 1.0) + tau * w * np.sum(a * g * vxxx)
    return float(lhs), float(rhs)


def _h1_dist(u: CosineField, v: CosineField) -> float:
    d = u.coeffs - v.coeffs
    return math.sqrt(float(np.sum(d * d * (1.0 + u.grid.wavenumbers**2))))


def solve_step(u_prev: CosineField, tau: float, model: MobilityModel,
               picard_max: int = 1, picard_tol: float = 1e-10,
               stat_slack: float = 1e-6, t: float = 0.0):
    """Advance one step; returns (field, StepReport).

    picard_max = 1 is the semi-implicit step. Larger values iterate the
    frozen source until the H1 update drops below picard_tol. If updates
    start growing, the iterate with the smaller update is returned and the
    report is flagged ``stagnated``.
    """
    source = u_prev
    best = None
    prev_upd = math.inf
    stagnated = False
    iters = 0
    for iters in range(1, picard_max + 1):
        system = assemble_step(u_prev, source, tau, model)
        v = CosineField(solve_system(system, u_prev.coeffs[0]), u_prev.grid)
        if picard_max == 1:
            best = (v, system, source)
            break
        upd = _h1_dist(v, source)
        if upd < picard_tol:
            best = (v, system, source)
            break
        if upd > prev_upd:
            stagnated = True
            break
        best = (v, system, source)
        prev_upd = upd
        source = v
    else:
        raise PicardNotConverged(f"no convergence in {picard_max} Picard iterations")
    v, system, source = best
    lhs, rhs = estim_stat(v, u_prev, system)
    gap = lhs - rhs
    ok = gap <= stat_slack * (abs(lhs) + abs(rhs)) + 1e-14
    diss = fn.dissipation_increment(v, model, tau, frozen=source)
    snap = fn.snapshot(v, model, t + tau, diss)
    report = StepReport(accepted=ok, picard_iters=iters, tau_used=tau, snapshot=snap,
                        estim_stat_ok=ok, stagnated=stagnated,
                        estim_stat_gap=gap / max(abs(lhs) + abs(rhs), 1e-300))
    return v, report


@dataclass
class Trajectory:
    config: RunConfig
    times: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    initial_snapshot: fn.DiagnosticSnapshot | None = None
    status: str = "running"

    @property
    def final(self) -> CosineField:
        return self.fields[-1]

    @property
    def monitors_ok(self) -> bool:
        return all(r.monitors_ok for r in self.reports)

    @property
    def cumulative_dissipation(self) -> np.ndarray:
        return np.cumsum([r.snapshot.dissipation_increment for r in self.reports])

    def at(self, t: float) -> CosineField:
        """Rothe interpolant: the state of the last step started at or before t."""
        i = int(np.searchsorted(np.asarray(self.times), t, side="right")) - 1
        return self.fields[max(i, 0)]

    def values(self) -> np.ndarray:
        return np.array([u.values for u in self.fields])

    def min_u(self) -> float:
        return float(min(np.min(u.values) for u in self.fields))

    def max_u(self) -> float:
        return float(max(np.max(u.values) for u in self.fields))


def _enforced_ok(rep: StepReport, enforce) -> bool:
    return all(getattr(rep, _MONITOR_FLAGS[name]) for name in enforce)


def run(config: RunConfig) -> Trajectory:
    """Integrate to t_end with monitor-driven step control.

    A step is rejected and tau halved when estim-stat, the cumulative energy
    or entropy inequality, or the H_eps growth bound fails. After
    ``restore_after`` clean steps tau doubles back toward tau0. The L-inf
    corridor |u| <= M^(1/n) is only flagged, since a smaller step cannot
    repair it.
    """
    model = config.model
    u = config.initial_field()
    traj = Trajectory(config)
    snap0 = fn.snapshot(u, model, 0.0)
    traj.initial_snapshot = snap0
    traj.times.append(0.0)
    traj.fields.append(u)
    E0, S0, H0 = snap0.energy, snap0.entropy_Geps, snap0.H_eps
    s = config.monitor_slack
    bound_cap = model.r_cap
    t = 0.0
    tau = config.tau0
    clean = 0
    cum_diss = 0.0
    cum_ent = 0.0
    t_end = config.t_end
    while t < t_end * (1.0 - 1e-12):
        dt = min(tau, t_end - t)
        if abs(dt - tau) <= 1e-9 * tau:
            dt = tau  # absorb roundoff in the remaining time
        try:
            v, rep = solve_step(u, dt, model, config.picard_max, config.picard_tol,
                                config.stat_slack, t)
        except StepFailure as exc:
            log.info("step at t=%.6g, tau=%.3g failed: %s", t, dt, exc)
            rep = None
        if rep is not None:
            snap = rep.snapshot
            e_ok = snap.energy + cum_diss + snap.dissipation_increment <= E0 + s * (abs(E0) + 1.0)
            ent_total = snap.entropy_Geps + cum_ent + dt * fn.entropy_dissipation_rate(v)
            s_ok = ent_total <= S0 + s * (abs(S0) + 1.0)
            h_ok = snap.H_eps <= H0 * math.exp((t + dt) / 2.0) * (1.0 + s) + 1e-12
            c_ok = max(abs(snap.min_u), abs(snap.max_u)) <= bound_cap
            rep = replace(rep, energy_monitor_ok=e_ok, entropy_monitor_ok=s_ok,
                          lyapunov_ok=h_ok, corridor_ok=c_ok)
        if rep is None or not _enforced_ok(rep, config.enforce):
            tau = dt / 2.0
            clean = 0
            if tau < config.tau_floor:
                traj.status = "aborted"
                log.error("tau underflow at t=%.6g; last report: %s; coeffs[:8]=%s",
                          t, rep, u.coeffs[:8])
                raise RunAborted(f"tau fell below {config.tau_floor:g} at t={t:.6g}", traj)
            continue
        rep = replace(rep, accepted=True)
        cum_diss += rep.snapshot.dissipation_increment
        cum_ent += dt * fn.entropy_dissipation_rate(v)
        t = t_end if abs(t_end - (t + dt)) <= 1e-9 * dt else t + dt
        u = v
        traj.times.append(t)
        traj.fields.append(v)
        traj.reports.append(rep)
        if rep.stagnated:
            tau = dt / 2.0
            clean = 0
        else:
            clean += 1
            if clean >= config.restore_after and tau < config.tau0:
                tau = min(2.0 * tau, config.tau0)
                clean = 0
    traj.status = "complete"
    return traj


def flux(u: CosineField, model: MobilityModel) -> np.ndarray:
    """Grid samples of f_eps(u) (u_xxx - (I u)_x)."""
    return model.f_eps(u.values) * fn.pressure_gradient(u).values


def weak_residual(traj: Trajectory, phi, phi_t, phi_x, phi_xx,
                  model: MobilityModel | None = None, n_gauss: int = 4) -> float:
    """Residual of the twice-integrated weak form on the Rothe interpolant.

    int_Q u phi_t - f(u)(u_xx - I u) phi_xx - f'(u) u_x (u_xx - I u) phi_x
        + int u0 phi(0)

    Test functions are callables of (t, x) and must satisfy phi_x = 0 on
    the walls and phi(T, .) = 0. The mobility is f_eps of ``model``.
    """
    model = model or traj.config.model
    grid = traj.fields[0].grid
    x = grid.nodes
    w = grid.weight
    gl_x, gl_w = np.polynomial.legendre.leggauss(n_gauss)
    res = float(np.sum(traj.fields[0].values * phi(0.0, x)) * w)
    times = traj.times
    for i in range(len(times) - 1):
        t0, t1 = times[i], times[i + 1]
        u = traj.fields[i]
        uv = u.values
        pres = (derivative(u, 2) - apply_I(u)).values
        ux = derivative(u, 1).values
        fu = model.f_eps(uv)
        dfu = model.df_eps(uv)
        res += float(np.sum(uv * (phi(t1, x) - phi(t0, x))) * w)
        half = 0.5 * (t1 - t0)
        for gx, gw in zip(gl_x, gl_w):
            tq = t0 + half * (gx + 1.0)
            integrand = -fu * pres * phi_xx(tq, x) - dfu * ux * pres * phi_x(tq, x)
            res += half * gw * float(np.sum(integrand) * w)
    return res
