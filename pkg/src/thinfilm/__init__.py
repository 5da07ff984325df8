"""Spectral solver and estimate monitors for a thin-film equation with a
nonlocal destabilizing term on (0, 1) with Neumann/no-flux walls:

    u_t + (f(u) (u_xx - I(u))_x)_x = 0,   I = -(-d^2/dx^2)^(1/2).
"""
from .functionals import (DiagnosticSnapshot, check_h1_bound, check_interpolation,
                          check_nash, calibrate_nash, dissipation_increment, energy,
                          entropy, lyapunov_H, mass)
from .mobility import G, MobilityModel, f
from .spectral import (CosineField, GridSpec, SineField, analyze, apply_I, apply_I_kernel,
                       derivative, harmonic_extension, kernel_nu, seminorm_Hs, synthesize)
from .stepper import (RunAborted, RunConfig, StepReport, StepSystem, Trajectory,
                      assemble_step, flux, run, solve_step, weak_residual)

__version__ = "0.1.0"
