import math
from dataclasses import replace

import numpy as np
import pytest

from thinfilm import continuation as ct
from thinfilm import functionals as fn
from thinfilm.io import InitialCondition
from thinfilm.mobility import MobilityModel
from thinfilm.spectral import GridSpec
from thinfilm.stepper import RunConfig, default_cap, run

from conftest import mode_field


def config(grid, u0, eps=1e-3, t_end=0.02, tau0=1e-3, **kw):
    return RunConfig(grid=grid, model=MobilityModel(3, eps, default_cap(u0, 3)),
                     initial=u0, tau0=tau0, t_end=t_end, **kw)


def trend_ok(d):
    """Non-increasing with at most one inversion."""
    return sum(b > a for a, b in zip(d, d[1:])) <= 1


def test_ladder_validation(grid16):
    cfg = config(grid16, mode_field(grid16, level=1.0))
    for bad in ([1e-2, 1e-1], [1e-1, 1e-1], [1e-1, -1e-2], []):
        with pytest.raises(ValueError):
            ct.eps_sweep(cfg, bad)


def test_eps_sweep_constant_data(grid16):
    rep = ct.eps_sweep(config(grid16, mode_field(grid16, level=1.0)), [1e-1, 1e-2, 1e-3])
    assert rep.cauchy_l2 == [0.0, 0.0] and rep.cauchy_uniform == [0.0, 0.0]
    assert not rep.partial and rep.monitors_ok
    assert all(r.holder == 0.0 for r in rep.per_run)


def test_eps_sweep_trend_and_lower_bound():
    g = GridSpec(32)
    u0 = mode_field(g, (1, 0.5), level=1.0)
    rep = ct.eps_sweep(config(g, u0, t_end=0.05), [1e-1, 1e-2, 1e-3, 1e-4])
    assert all(d >= 0 for d in rep.cauchy_l2 + rep.cauchy_uniform)
    assert trend_ok(rep.cauchy_l2)
    assert min(r.min_u for r in rep.per_run) >= -0.5
    assert rep.monitors_ok
    # Hoelder quotient does not grow along the sweep
    assert max(rep.holder_quotients) <= 2 * rep.per_run[0].holder


def test_parallel_sweep_matches_sequential(grid16):
    u0 = mode_field(grid16, (1, 0.3), level=1.0)
    cfg = config(grid16, u0, t_end=0.01)
    a = ct.eps_sweep(cfg, [1e-1, 1e-2], workers=1)
    b = ct.eps_sweep(cfg, [1e-1, 1e-2], workers=2)
    assert a.cauchy_l2 == b.cauchy_l2
    for ra, rb in zip(a.per_run, b.per_run):
        assert np.array_equal(ra.final_field.coeffs, rb.final_field.coeffs)


def test_cauchy_uses_coarsest_checkpoints(grid16):
    u0 = mode_field(grid16, (1, 0.3), level=1.0)
    fine = run(config(grid16, u0, tau0=5e-4, t_end=0.01))
    coarse = run(config(grid16, u0, tau0=1e-3, t_end=0.01))
    assert np.array_equal(ct.checkpoint_times([fine, coarse]), coarse.times)
    l2, _ = ct.cauchy_distances([coarse, coarse])
    assert l2 == [0.0]


def test_delta_lift_flat_zero(grid16):
    rep = ct.delta_lift(config(grid16, mode_field(grid16, level=0.0), t_end=0.01), [0.1])
    r = rep.per_run[0]
    assert np.allclose(r.final_field.coeffs, np.r_[0.1, np.zeros(16)], atol=0)
    assert r.extra["mass_offset"] == pytest.approx(0.1, abs=1e-15)


def test_delta_lift_mass_offset_every_checkpoint():
    g = GridSpec(32)
    u0 = InitialCondition(kind="bump", center=0.5, width=0.3, height=1.0).build(g)
    rep = ct.delta_lift(config(g, u0, t_end=0.01, enforce=("estim_stat", "energy")),
                        [1e-1, 1e-2])
    for d, r in zip(rep.parameter_ladder, rep.per_run):
        for f in r.trajectory.fields:
            assert f.mass - u0.mass == pytest.approx(d, abs=1e-14)
        assert r.status == "complete"


def test_delta_lift_rejects_negative_data(grid16):
    with pytest.raises(ValueError):
        ct.delta_lift(config(grid16, mode_field(grid16, (1, 1.0), level=0.2)), [0.1])


def test_bump_entropy_infinite_then_lifted():
    g = GridSpec(64)
    u0 = InitialCondition(kind="bump", center=0.5, width=0.25, height=1.0).build(g)
    m = MobilityModel(2.5, 1e-3, 100)
    with pytest.raises(ValueError):  # G(0) = inf for n >= 2
        fn.entropy_G(u0, m)
    deltas = [1e-1, 3e-2, 1e-2, 3e-3]
    ents = [fn.entropy_G(u0 + d, m) for d in deltas]
    assert all(math.isfinite(e) for e in ents)
    assert all(b > a for a, b in zip(ents, ents[1:]))
    rate = math.log(ents[-1] / ents[-2]) / math.log(deltas[-1] / deltas[-2])
    assert rate == pytest.approx(2 - 2.5, abs=0.1)


def test_positivity_flux_positive_trajectory(grid16):
    traj = run(config(grid16, mode_field(grid16, (1, 0.2), level=1.0), t_end=0.01))
    st = ct.positivity_set_flux(traj, 0.1)
    assert st.low_points == 0 and st.low_l2 == 0.0 and st.high_l2 > 0
    with pytest.raises(ValueError):
        ct.positivity_set_flux(traj, 0.0)


def test_low_set_flux_monotone_in_threshold():
    g = GridSpec(32)
    u0 = mode_field(g, (2, -0.5 / math.sqrt(2)), level=0.5)
    cfg = RunConfig(grid=g, model=MobilityModel(3, 1e-6, default_cap(u0, 3)), initial=u0,
                    tau0=1e-3, t_end=0.01, enforce=("estim_stat", "energy"))
    traj = run(cfg)
    lows = [ct.positivity_set_flux(traj, eta).low_l2 for eta in (1e-1, 3e-2, 1e-2, 1e-3)]
    assert all(b <= a for a, b in zip(lows, lows[1:]))
    assert lows[0] > 0


def test_holder_constant_and_refinement():
    vals = []
    for n in (64, 128):
        g = GridSpec(n)
        u0 = mode_field(g, (1, 0.5), level=1.0)
        vals.append(ct.holder_diagnostic(run(config(g, u0, t_end=0.02))))
    assert all(math.isfinite(v) and v > 0 for v in vals)
    assert max(vals) / min(vals) <= 2.0
    g = GridSpec(16)
    assert ct.holder_diagnostic(run(config(g, mode_field(g, level=1.0), t_end=0.01))) == 0.0


def test_holder_needs_two_checkpoints(grid16):
    traj = run(config(grid16, mode_field(grid16, level=1.0), t_end=0.001))
    traj.fields = traj.fields[:1]
    with pytest.raises(ValueError):
        ct.holder_diagnostic(traj)


def test_report_never_averages_violations(grid16):
    # a corridor violation in one run makes the whole report fail
    u0 = mode_field(grid16, (1, 0.2), level=1.0)
    good = config(grid16, u0, t_end=0.01)
    bad_model = MobilityModel(3, 1e-3, 1.05)  # |u| <= 1.016 corridor breached
    rep = ct.eps_sweep(replace(good, model=bad_model), [1e-1, 1e-2])
    assert not rep.monitors_ok
    assert any(r.monitors["corridor_ok"] > 0 for r in rep.per_run)
