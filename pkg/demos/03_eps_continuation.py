"""Letting eps go to zero.

The same positive initial profile is run for a decreasing ladder of
lower mobility caps. Successive runs approach each other (the Cauchy
distances shrink) while the minimum of u stays away from zero. The
Hoelder quotient, a discrete stand-in for the C^(1/2, 1/8) bound, stays
flat along the ladder.
"""
import numpy as np

from thinfilm import continuation as ct
from thinfilm.mobility import MobilityModel
from thinfilm.spectral import CosineField, GridSpec
from thinfilm.stepper import RunConfig, default_cap

grid = GridSpec(64)
c = np.zeros(65)
c[0], c[1] = 0.5, 0.33
u0 = CosineField(c, grid)
cfg = RunConfig(grid=grid, model=MobilityModel(3, 1e-1, default_cap(u0, 3)), initial=u0,
                tau0=1e-3, t_end=0.2)
rep = ct.eps_sweep(cfg, [1e-1, 1e-2, 1e-3, 1e-4])

print(f"min u0 = {u0.values.min():.4f}")
print(f"{'eps':>8} {'min u':>8} {'max u':>8} {'hoelder':>8} {'monitors':>9}")
for r in rep.per_run:
    print(f"{r.parameter:8.0e} {r.min_u:8.4f} {r.max_u:8.4f} {r.holder:8.4f} "
          f"{'ok' if r.monitors_ok else 'FAIL':>9}")
print("sup-in-time L2 distance between neighbours:",
      ", ".join(f"{d:.2e}" for d in rep.cauchy_l2))
print("sup-norm distance between neighbours:      ",
      ", ".join(f"{d:.2e}" for d in rep.cauchy_uniform))
