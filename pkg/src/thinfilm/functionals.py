"""Scalar diagnostics and functional-inequality checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .mobility import MobilityModel
from .spectral import CosineField, GridSpec, apply_I, derivative, seminorm_Hs

SEMINORM_ORDERS = (0.5, 1.0, 1.5, 2.0)

# H1 bound constants: |u|_H1^2 <= 8 E + 2 C |u|_L1^2.
H1_ALPHA = 8.0


@dataclass(frozen=True)
class DiagnosticSnapshot:
    t: float
    mass: float
    energy: float
    entropy_G: float
    entropy_Geps: float
    H_eps: float
    dissipation_increment: float
    seminorms: dict = field(default_factory=dict)
    min_u: float = 0.0
    max_u: float = 0.0


def mass(u: CosineField) -> float:
    return u.mass


def energy(u: CosineField) -> float:
    return 0.5 * (seminorm_Hs(u, 1.0) - seminorm_Hs(u, 0.5))


def entropy_G(u: CosineField, model: MobilityModel) -> float:
    """int G(u); raises if any grid sample is non-positive."""
    v = u.values
    if np.min(v) <= 0:
        raise ValueError("entropy with G needs u > 0 on the grid")
    return u.grid.integrate(model.G(v))


def entropy_Geps(u: CosineField, model: MobilityModel) -> float:
    return u.grid.integrate(model.G_eps(u.values))


def entropy(u: CosineField, model: MobilityModel, regularized: bool = False) -> float:
    return entropy_Geps(u, model) if regularized else entropy_G(u, model)


def pressure_gradient(u: CosineField):
    """(u_xx - I u)_x as a sine series."""
    return derivative(u, 3) - derivative(apply_I(u), 1)


def dissipation_increment(u: CosineField, model: MobilityModel, dt: float,
                          frozen: CosineField | None = None) -> float:
    """dt * int f_eps(u) [(u_xx - I u)_x]^2.

    With ``frozen`` the mobility and the nonlocal term are taken from that
    state instead: dt * int f_eps(w) (u_xxx - (I w)_x)^2, the exact
    dissipation of one semi-implicit step from w to u.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if frozen is None:
        a = model.f_eps(u.values)
        p = pressure_gradient(u).values
    else:
        a = model.f_eps(frozen.values)
        p = (derivative(u, 3) - derivative(apply_I(frozen), 1)).values
    return dt * u.grid.integrate(a * p * p)


def entropy_dissipation_rate(u: CosineField) -> float:
    """int u_xx^2 + u_x (I u)_x = |u|_H2^2 - |u|_H3/2^2."""
    return seminorm_Hs(u, 2.0) - seminorm_Hs(u, 1.5)


def lyapunov_H(u: CosineField, model: MobilityModel) -> float:
    """int u_x^2 + 2 M G_eps(u)."""
    return seminorm_Hs(u, 1.0) + 2.0 * model.cap_M * entropy_Geps(u, model)


def snapshot(u: CosineField, model: MobilityModel, t: float = 0.0,
             dissipation: float = 0.0) -> DiagnosticSnapshot:
    v = u.values
    lo, hi = float(np.min(v)), float(np.max(v))
    ent_g = entropy_G(u, model) if lo > 0 else float("nan")
    ent_ge = entropy_Geps(u, model) if model.eps > 0 else float("nan")
    h_eps = seminorm_Hs(u, 1.0) + 2.0 * model.cap_M * ent_ge
    return DiagnosticSnapshot(
        t=t, mass=u.mass, energy=energy(u), entropy_G=ent_g,
        entropy_Geps=ent_ge, H_eps=h_eps, dissipation_increment=dissipation,
        seminorms={s: seminorm_Hs(u, s) for s in SEMINORM_ORDERS},
        min_u=lo, max_u=hi)


# --- inequalities -----------------------------------------------------------

def l1_norm(u: CosineField) -> float:
    return u.grid.integrate(np.abs(u.values))


def l2_norm_sq(u: CosineField) -> float:
    return float(np.sum(u.coeffs**2))


def random_corpus(grid: GridSpec, size: int, seed: int = 0):
    """Band-limited test fields with mixed spectral decay and cutoffs.

    Each field has a random cutoff K in [1, N], standard-normal coefficients
    damped by (1+k)^-p with p uniform in [0, 3], and a random mean offset so
    both oscillatory and nearly-constant profiles appear.
    """
    rng = np.random.default_rng(seed)
    n = grid.n_modes
    k = np.arange(n + 1)
    for _ in range(size):
        cut = rng.integers(1, n + 1)
        p = rng.uniform(0.0, 3.0)
        c = rng.standard_normal(n + 1) * (1.0 + k) ** (-p)
        c[cut + 1:] = 0.0
        c[0] = rng.normal(0.0, 3.0)
        yield CosineField(c, grid)


def nash_ratio(u: CosineField) -> float:
    l1 = l1_norm(u)
    return (l2_norm_sq(u) - 0.5 * seminorm_Hs(u, 1.0)) / l1**2


@lru_cache(maxsize=4)
def calibrate_nash(n_modes: int = 32, size: int = 10_000, seed: int = 0,
                   slack: float = 1.1) -> float:
    """Empirical Nash constant: slack * max ratio over a fixed corpus + constants."""
    grid = GridSpec(n_modes)
    best = nash_ratio(CosineField.constant(1.0, grid))
    for u in random_corpus(grid, size, seed):
        best = max(best, nash_ratio(u))
    return slack * best


def check_nash(u: CosineField, c_nash: float | None = None):
    c = calibrate_nash() if c_nash is None else c_nash
    lhs = l2_norm_sq(u)
    rhs = 0.5 * seminorm_Hs(u, 1.0) + c * l1_norm(u) ** 2
    return lhs, rhs, bool(lhs <= rhs)


def check_h1_bound(u: CosineField, alpha: float = H1_ALPHA, beta: float | None = None):
    if beta is None:
        beta = 2.0 * calibrate_nash()
    lhs = seminorm_Hs(u, 1.0)
    rhs = alpha * energy(u) + beta * l1_norm(u) ** 2
    return lhs, rhs, bool(lhs <= rhs * (1 + 1e-12))


def check_interpolation(u: CosineField):
    """|u|_{3/2}^4 <= |u|_1^2 |u|_2^2 (Cauchy-Schwarz on coefficients)."""
    lhs = seminorm_Hs(u, 1.5) ** 2
    rhs = seminorm_Hs(u, 1.0) * seminorm_Hs(u, 2.0)
    return lhs, rhs, bool(lhs <= rhs * (1 + 1e-12))
