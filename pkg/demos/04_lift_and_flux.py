"""Data that touch zero: the delta lift and the flux on the positivity set.

Part 1. A compactly supported bump has infinite entropy when n >= 2, since
G(u) ~ u^(2-n) blows up at u = 0. Lifting by delta makes it finite, and the
entropy grows like delta^(2-n) as delta shrinks.

Part 2. A profile that touches zero at the walls is run with a tiny eps.
The flux f(u)(u_xx - I u)_x restricted to {u <= eta} vanishes at least like
eta^(n/2), while on {u > 2 eta} it stays bounded independently of eta.
"""
import math

import numpy as np

from thinfilm import continuation as ct
from thinfilm import functionals as fn
from thinfilm.io import InitialCondition
from thinfilm.mobility import MobilityModel
from thinfilm.spectral import CosineField, GridSpec
from thinfilm.stepper import RunConfig, default_cap, run

grid = GridSpec(64)
bump = InitialCondition(kind="bump", center=0.5, width=0.25, height=1.0).build(grid)
model = MobilityModel(2.5, 1e-3, 100.0)
print("Part 1: entropy of the lifted bump, n = 2.5")
prev = None
for d in (1e-1, 3e-2, 1e-2, 3e-3):
    s = fn.entropy_G(bump + d, model)
    rate = "" if prev is None else f"  local exponent {math.log(s / prev[1]) / math.log(d / prev[0]):+.3f}"
    print(f"  delta = {d:7.0e}  entropy = {s:8.4f}{rate}")
    prev = (d, s)
print("  expected exponent 2 - n = -0.5")

rep = ct.delta_lift(RunConfig(grid=grid, model=MobilityModel(2.5, 1e-3, default_cap(bump, 2.5)),
                              initial=bump, tau0=1e-3, t_end=0.02,
                              enforce=("estim_stat", "energy")), [1e-1, 1e-2])
for r in rep.per_run:
    print(f"  lifted run delta = {r.parameter:g}: mass offset {r.extra['mass_offset']:.3e}, "
          f"flux L2 {r.extra['flux_l2']:.3f}")

print("\nPart 2: flux near the contact set, n = 3, eps = 1e-9")
n = 3.0
c = np.zeros(65)
c[0], c[2] = 0.5, -0.5 / math.sqrt(2)
u0 = CosineField(c, grid)
traj = run(RunConfig(grid=grid, model=MobilityModel(n, 1e-9, default_cap(u0, n)), initial=u0,
                     tau0=1e-3, t_end=0.05, enforce=("estim_stat", "energy")))
print(f"  {'eta':>6} {'low-set flux':>13} {'/ eta^(n/2)':>12} {'high-set flux':>14}")
for eta in (1e-1, 1e-2, 1e-3):
    s = ct.positivity_set_flux(traj, eta)
    print(f"  {eta:6.0e} {s.low_l2:13.3e} {s.low_l2 / eta ** (n / 2):12.4f} {s.high_l2:14.4f}")
