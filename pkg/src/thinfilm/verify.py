"""Identity and inequality checks for the spectral operator calculus."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import functionals as fn
from .spectral import (CosineField, GridSpec, analyze, apply_I, apply_I_kernel, derivative,
                       harmonic_extension, kernel_seminorm_half, seminorm_Hs,
                       sine_derivative)


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tol)


def extension_normal_derivative(u: CosineField, x, h: float = 1e-4):
    """d/dy of the harmonic extension at y = 0 by a one-sided 5-point stencil."""
    w = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
    return sum(wi * harmonic_extension(u, x, i * h) for i, wi in enumerate(w)) / h


def random_fields(grid: GridSpec, count: int, max_mode: int | None = None,
                  seed: int = 0, decay: float = 0.0):
    """Fields with standard-normal coefficients on modes 0..max_mode."""
    rng = np.random.default_rng(seed)
    top = grid.n_modes if max_mode is None else max_mode
    k = np.arange(grid.n_modes + 1)
    for _ in range(count):
        c = np.zeros(grid.n_modes + 1)
        c[:top + 1] = rng.standard_normal(top + 1)
        if decay:
            c /= (1.0 + k) ** decay
        yield CosineField(c, grid)


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def operator_checks(grid: GridSpec, count: int = 200, seed: int = 0) -> list:
    w = grid.weight
    eig = inv = q_half = q_3half = rt = esplit = 0.0
    q_k = [0.0, 0.0, 0.0]
    for u in random_fields(grid, count, seed=seed):
        iu = apply_I(u)
        eig = max(eig, float(np.max(np.abs(iu.coeffs + grid.wavenumbers * u.coeffs))))
        inv = max(inv, float(np.max(np.abs(apply_I(iu).coeffs + derivative(u, 2).coeffs))))
        q_half = max(q_half, _rel(-w * np.sum(u.values * iu.values), seminorm_Hs(u, 0.5)))
        q_3half = max(q_3half, _rel(-w * np.sum(derivative(u, 1).values * derivative(iu, 1).values),
                                    seminorm_Hs(u, 1.5)))
        dk = iu
        for k in range(3):
            q_k[k] = max(q_k[k], _rel(w * np.sum(dk.values**2), seminorm_Hs(u, k + 1)))
            nxt = derivative(dk, 1) if k % 2 == 0 else sine_derivative(dk)
            dk = nxt
        rt = max(rt, float(np.max(np.abs(analyze(u.values, grid).coeffs - u.coeffs))))
        quad = 0.5 * w * np.sum(derivative(u, 1).values ** 2) + 0.5 * w * np.sum(u.values * iu.values)
        esplit = max(esplit, _rel(quad, fn.energy(u)))
    return [
        Check("eigen-action I(phi_k) = -k pi phi_k", eig, 0.0),
        Check("I o I = -d2/dx2", inv, 1e-12 * grid.wavenumbers[-1] ** 2),
        Check("-<u, I u> = |u|^2_H1/2", q_half, 1e-10),
        Check("-<u_x, (I u)_x> = |u|^2_H3/2", q_3half, 1e-10),
        Check("|I u|^2 = |u|^2_H1", q_k[0], 1e-10),
        Check("|(I u)_x|^2 = |u|^2_H2", q_k[1], 1e-10),
        Check("|(I u)_xx|^2 = |u|^2_H3", q_k[2], 1e-10),
        Check("analyze o synthesize = id", rt, 1e-12),
        Check("energy splitting", esplit, 1e-10),
    ]


def representation_checks(count: int = 5, seed: int = 1, pv_cut: float = 1e-3) -> list:
    """Spectral I vs kernel quadrature vs extension normal derivative (8-mode fields)."""
    grid = GridSpec(8, 2**16)
    xs = np.array([0.1, 0.23, 0.5, 0.77, 0.9])
    k_err = e_err = d_err = 0.0
    for u in random_fields(grid, count, seed=seed):
        spec = apply_I(u)(xs)
        ker = np.array([apply_I_kernel(u, x, pv_cut) for x in xs])
        ext = extension_normal_derivative(u, xs)
        k_err = max(k_err, float(np.max(np.abs(ker - spec))))
        e_err = max(e_err, float(np.max(np.abs(ext - spec))))
        d_err = max(d_err, _rel(kernel_seminorm_half(u), seminorm_Hs(u, 0.5)))
    return [
        Check("kernel PV quadrature vs spectral I", k_err, 1e-2),
        Check("extension d/dy vs spectral I", e_err, 1e-6),
        Check("double integral vs |u|^2_H1/2", d_err, 1e-2),
    ]


def inequality_checks(grid: GridSpec, count: int = 1000, seed: int = 2) -> list:
    c = fn.calibrate_nash()
    bad = [0, 0, 0]
    for u in random_fields(grid, count, seed=seed):
        bad[0] += not fn.check_nash(u, c)[2]
        bad[1] += not fn.check_h1_bound(u, fn.H1_ALPHA, 2 * c)[2]
        bad[2] += not fn.check_interpolation(u)[2]
    return [
        Check(f"Nash (C={c:.4g}) violations", bad[0], 0),
        Check("H1 bound (alpha=8, beta=2C) violations", bad[1], 0),
        Check("interpolation (C=1) violations", bad[2], 0),
    ]


def identity_suite(grid: GridSpec | None = None, count: int = 200) -> list:
    grid = grid or GridSpec(128)
    return operator_checks(grid, count) + representation_checks() + inequality_checks(grid, count)


def format_table(checks) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'error':>11}  {'tol':>9}  result"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {c.error:11.3e}  {c.tol:9.1e}  "
                     f"{'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
