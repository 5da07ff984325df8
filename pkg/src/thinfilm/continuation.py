"""Continuation protocols: eps -> 0 ladders, delta-lifted data, flux on the positivity set."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import functionals as fn
from .spectral import CosineField, evaluate
from .stepper import RunAborted, RunConfig, Trajectory, flux, run

log = logging.getLogger(__name__)


@dataclass
class RunSummary:
    parameter: float
    status: str
    min_u: float
    max_u: float
    final_field: CosineField
    monitors: dict
    holder: float
    trajectory: Trajectory = field(repr=False)
    extra: dict = field(default_factory=dict)

    @property
    def monitors_ok(self) -> bool:
        return self.status == "complete" and all(v == 0 for v in self.monitors.values())


@dataclass
class ContinuationReport:
    parameter_ladder: list
    per_run: list
    cauchy_l2: list
    cauchy_uniform: list
    partial: bool = False

    @property
    def holder_quotients(self) -> list:
        return [r.holder for r in self.per_run]

    @property
    def holder_quotient(self) -> float:
        return max(self.holder_quotients)

    @property
    def monitors_ok(self) -> bool:
        return all(r.monitors_ok for r in self.per_run)


@dataclass(frozen=True)
class FluxStats:
    threshold: float
    low_l2: float
    high_l2: float
    low_points: int
    high_points: int


def monitor_summary(traj: Trajectory) -> dict:
    """Number of accepted steps on which each monitor flag was false."""
    names = ("estim_stat_ok", "energy_monitor_ok", "entropy_monitor_ok",
             "lyapunov_ok", "corridor_ok")
    return {n: sum(not getattr(r, n) for r in traj.reports) for n in names}


def _checked_ladder(ladder) -> list:
    ladder = [float(x) for x in ladder]
    if not ladder or any(x <= 0 for x in ladder):
        raise ValueError("ladder values must be positive")
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly decreasing")
    return ladder


def _run_safely(config: RunConfig) -> Trajectory:
    try:
        return run(config)
    except RunAborted as exc:
        log.warning("run aborted: %s", exc)
        return exc.trajectory


def _run_all(configs, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(_run_safely, configs))
    return [_run_safely(c) for c in configs]


def _summarize(param, traj: Trajectory, **extra) -> RunSummary:
    return RunSummary(parameter=param, status=traj.status, min_u=traj.min_u(),
                      max_u=traj.max_u(), final_field=traj.final,
                      monitors=monitor_summary(traj), holder=holder_diagnostic(traj),
                      trajectory=traj, extra=extra)


def checkpoint_times(trajs) -> np.ndarray:
    """Accepted step times of the coarsest run (fewest steps)."""
    coarsest = min(trajs, key=lambda tr: len(tr.times))
    return np.asarray(coarsest.times)


def cauchy_distances(trajs, times=None):
    """Sup-in-time L2 and uniform distances between consecutive runs.

    Runs are compared at shared checkpoint times through the Rothe
    (previous-step hold) interpolant.
    """
    if times is None:
        times = checkpoint_times(trajs)
    l2, sup = [], []
    for a, b in zip(trajs, trajs[1:]):
        d_l2 = d_sup = 0.0
        for t in times:
            ua, ub = a.at(t), b.at(t)
            d_l2 = max(d_l2, float(np.linalg.norm(ua.coeffs - ub.coeffs)))
            d_sup = max(d_sup, float(np.max(np.abs(ua.values - ub.values))))
        l2.append(d_l2)
        sup.append(d_sup)
    return l2, sup


def eps_sweep(config: RunConfig, eps_ladder, workers: int | None = None) -> ContinuationReport:
    ladder = _checked_ladder(eps_ladder)
    configs = [replace(config, model=replace(config.model, eps=e)) for e in ladder]
    trajs = _run_all(configs, workers)
    l2, sup = cauchy_distances(trajs)
    return ContinuationReport(
        parameter_ladder=ladder,
        per_run=[_summarize(e, tr) for e, tr in zip(ladder, trajs)],
        cauchy_l2=l2, cauchy_uniform=sup,
        partial=any(tr.status != "complete" for tr in trajs))


def delta_lift(config: RunConfig, delta_ladder, eps_ladder=None,
               workers: int | None = None) -> ContinuationReport:
    """Run from u0 + delta for each delta.

    Without ``eps_ladder`` each lifted problem is solved at the config's eps;
    with it, an eps sweep is run per delta and its finest run is kept.
    """
    ladder = _checked_ladder(delta_ladder)
    u0 = config.initial_field()
    if np.min(u0.values) < -1e-3 * max(1.0, np.max(np.abs(u0.values))):
        raise ValueError("delta lift expects non-negative initial data")
    trajs = []
    for d in ladder:
        cfg = replace(config, initial=u0 + d)
        if eps_ladder is None:
            trajs.append(_run_safely(cfg))
        else:
            rep = eps_sweep(cfg, eps_ladder, workers)
            trajs.append(rep.per_run[-1].trajectory)
    l2, sup = cauchy_distances(trajs)
    per_run = []
    for d, tr in zip(ladder, trajs):
        fx = total_flux_l2(tr)
        lifted = tr.fields[0]
        try:
            ent0 = fn.entropy_G(lifted, config.model)
        except ValueError:
            ent0 = float("inf")
        per_run.append(_summarize(d, tr, mass_offset=tr.final.mass - u0.mass,
                                  flux_l2=fx, initial_entropy=ent0))
    return ContinuationReport(parameter_ladder=ladder, per_run=per_run,
                              cauchy_l2=l2, cauchy_uniform=sup,
                              partial=any(tr.status != "complete" for tr in trajs))


def _space_time(traj: Trajectory):
    """States, interval lengths and flux samples on the Rothe interpolant."""
    model = traj.config.model
    states = traj.fields[:-1]
    dts = np.diff(np.asarray(traj.times))
    U = np.array([u.values for u in states])
    H = np.array([flux(u, model) for u in states])
    return U, dts, H


def total_flux_l2(traj: Trajectory) -> float:
    if len(traj.fields) < 2:
        return 0.0
    U, dts, H = _space_time(traj)
    w = traj.fields[0].grid.weight
    return float(np.sqrt(np.sum(H**2 * dts[:, None]) * w))


def positivity_set_flux(traj: Trajectory, threshold: float) -> FluxStats:
    """L2(Q) norm of the flux on {u <= threshold} and on {u > 2 threshold}."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if len(traj.fields) < 2:
        return FluxStats(threshold, 0.0, 0.0, 0, 0)
    U, dts, H = _space_time(traj)
    w = traj.fields[0].grid.weight
    low = U <= threshold
    high = U > 2.0 * threshold
    h2 = H**2 * dts[:, None] * w
    return FluxStats(threshold, float(np.sqrt(np.sum(h2[low]))),
                     float(np.sqrt(np.sum(h2[high]))), int(low.sum()), int(high.sum()))


def holder_diagnostic(traj: Trajectory, n_x: int = 33, max_times: int = 48) -> float:
    """max |u(x1,t1) - u(x2,t2)| / (|x1-x2|^(1/2) + |t1-t2|^(1/8)) over sampled pairs.

    Samples are taken at fixed physical points so values are comparable
    across resolutions.
    """
    if len(traj.fields) < 2:
        raise ValueError("need at least two checkpoints")
    idx = np.unique(np.linspace(0, len(traj.fields) - 1, min(max_times, len(traj.fields)))
                    .round().astype(int))
    x = np.linspace(0.0, 1.0, n_x)
    t = np.asarray(traj.times)[idx]
    V = np.array([evaluate(traj.fields[i], x) for i in idx])
    X = np.broadcast_to(x, V.shape).ravel()
    T = np.broadcast_to(t[:, None], V.shape).ravel()
    V = V.ravel()
    den = np.sqrt(np.abs(X[:, None] - X[None, :])) + np.abs(T[:, None] - T[None, :]) ** 0.125
    num = np.abs(V[:, None] - V[None, :])
    mask = den > 0
    return float(np.max(num[mask] / den[mask])) if mask.any() else 0.0
