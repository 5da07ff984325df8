"""Neumann cosine basis on (0, 1) and the square-root operator I.

Fields are stored as coefficients in the orthonormal basis
``phi_0 = 1``, ``phi_k = sqrt(2) cos(k pi x)`` and sampled on a uniform
midpoint grid. Odd derivatives live in the sine basis
``psi_k = sqrt(2) sin(k pi x)`` so that ``u_x(0) = u_x(1) = 0`` holds by
construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class GridSpec:
    """Truncation and quadrature resolution.

    ``n_modes`` is the highest retained mode N; ``n_quad`` the number of
    midpoint nodes, 8(N+1) by default.
    """

    n_modes: int
    n_quad: int = 0

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.n_quad == 0:
            object.__setattr__(self, "n_quad", 8 * (self.n_modes + 1))
        if self.n_quad < 2 * (self.n_modes + 1):
            raise ValueError("n_quad must be >= 2*(n_modes+1)")

    @property
    def nodes(self) -> np.ndarray:
        return _basis(self.n_modes, self.n_quad)[0]

    @property
    def weight(self) -> float:
        return 1.0 / self.n_quad

    @property
    def wavenumbers(self) -> np.ndarray:
        """k*pi for k = 0..N."""
        return np.pi * np.arange(self.n_modes + 1)

    def integrate(self, samples) -> float:
        """Midpoint rule on the collocation grid."""
        return float(np.sum(samples) / self.n_quad)


@lru_cache(maxsize=32)
def _basis(n_modes: int, n_quad: int):
    x = (np.arange(n_quad) + 0.5) / n_quad
    k = np.arange(n_modes + 1)
    arg = np.pi * np.outer(x, k)
    cos = SQRT2 * np.cos(arg)
    cos[:, 0] = 1.0
    sin = SQRT2 * np.sin(arg[:, 1:])
    for a in (x, cos, sin):
        a.setflags(write=False)
    return x, cos, sin


def cos_matrix(grid: GridSpec) -> np.ndarray:
    """phi_k(x_j), shape (n_quad, N+1)."""
    return _basis(grid.n_modes, grid.n_quad)[1]


def sin_matrix(grid: GridSpec) -> np.ndarray:
    """psi_k(x_j) for k = 1..N, shape (n_quad, N)."""
    return _basis(grid.n_modes, grid.n_quad)[2]


@dataclass(frozen=True, eq=False)
class CosineField:
    coeffs: np.ndarray
    grid: GridSpec = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (self.grid.n_modes + 1,):
            raise ValueError(
                f"expected {self.grid.n_modes + 1} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: float, grid: GridSpec) -> "CosineField":
        c = np.zeros(grid.n_modes + 1)
        c[0] = value
        return cls(c, grid)

    @classmethod
    def mode(cls, k: int, grid: GridSpec, amplitude: float = 1.0) -> "CosineField":
        c = np.zeros(grid.n_modes + 1)
        c[k] = amplitude
        return cls(c, grid)

    @cached_property
    def values(self) -> np.ndarray:
        v = cos_matrix(self.grid) @ self.coeffs
        v.setflags(write=False)
        return v

    @property
    def mass(self) -> float:
        return float(self.coeffs[0])

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)

    def __add__(self, other):
        if isinstance(other, CosineField):
            return CosineField(self.coeffs + other.coeffs, self.grid)
        c = self.coeffs.copy()
        c[0] += other
        return CosineField(c, self.grid)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        return CosineField(scalar * self.coeffs, self.grid)

    __rmul__ = __mul__

    def __neg__(self):
        return CosineField(-self.coeffs, self.grid)


@dataclass(frozen=True, eq=False)
class SineField:
    """Coefficients s_1..s_N in the basis sqrt(2) sin(k pi x)."""

    coeffs: np.ndarray
    grid: GridSpec = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (self.grid.n_modes,):
            raise ValueError(f"expected {self.grid.n_modes} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @cached_property
    def values(self) -> np.ndarray:
        v = sin_matrix(self.grid) @ self.coeffs
        v.setflags(write=False)
        return v

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = np.arange(1, self.grid.n_modes + 1)
        return (SQRT2 * np.sin(np.pi * np.multiply.outer(x, k))) @ self.coeffs

    def __add__(self, other: "SineField") -> "SineField":
        return SineField(self.coeffs + other.coeffs, self.grid)

    def __sub__(self, other: "SineField") -> "SineField":
        return SineField(self.coeffs - other.coeffs, self.grid)

    def __mul__(self, scalar):
        return SineField(scalar * self.coeffs, self.grid)

    __rmul__ = __mul__


def synthesize(u: CosineField) -> np.ndarray:
    return u.values


def evaluate(u: CosineField, x) -> np.ndarray:
    """Evaluate the expansion at arbitrary points of [0, 1]."""
    x = np.asarray(x, dtype=float)
    k = np.arange(u.grid.n_modes + 1)
    basis = SQRT2 * np.cos(np.pi * np.multiply.outer(x, k))
    basis[..., 0] = 1.0
    return basis @ u.coeffs


def analyze(values, grid: GridSpec) -> CosineField:
    """Project grid samples onto the cosine basis (midpoint rule)."""
    v = np.asarray(values, dtype=float)
    if v.shape != (grid.n_quad,):
        raise ValueError(f"expected {grid.n_quad} samples, got {v.shape}")
    return CosineField(cos_matrix(grid).T @ v / grid.n_quad, grid)


def derivative(u: CosineField, order: int):
    """x-derivative of the given order (1..4).

    d/dx[sqrt(2) cos(k pi x)] = -k pi sqrt(2) sin(k pi x), so odd orders
    return a SineField and even orders a CosineField.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"unsupported derivative order {order}")
    kp = u.grid.wavenumbers
    c = u.coeffs
    if order == 1:
        return SineField(-kp[1:] * c[1:], u.grid)
    if order == 2:
        return CosineField(-kp**2 * c, u.grid)
    if order == 3:
        return SineField(kp[1:] ** 3 * c[1:], u.grid)
    return CosineField(kp**4 * c, u.grid)


def sine_derivative(s: SineField) -> CosineField:
    """d/dx of a sine series; the constant mode is zero."""
    kp = s.grid.wavenumbers
    c = np.zeros(s.grid.n_modes + 1)
    c[1:] = kp[1:] * s.coeffs
    return CosineField(c, s.grid)


def apply_I(u: CosineField) -> CosineField:
    """I(u) = -sum_k sqrt(lambda_k) c_k phi_k."""
    return CosineField(-u.grid.wavenumbers * u.coeffs, u.grid)


def seminorm_Hs(u: CosineField, s: float) -> float:
    """Squared homogeneous norm sum_{k>=1} c_k^2 (k pi)^(2s)."""
    if s < 0:
        raise ValueError("s must be non-negative")
    kp = u.grid.wavenumbers[1:]
    return float(np.sum(u.coeffs[1:] ** 2 * kp ** (2.0 * s)))


def harmonic_extension(u: CosineField, x, y):
    """Bounded harmonic extension to the half strip, with v_x = 0 on the walls."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("y must be non-negative")
    x = np.asarray(x, dtype=float)
    k = np.arange(u.grid.n_modes + 1)
    basis = SQRT2 * np.cos(np.pi * np.multiply.outer(x, k))
    basis[..., 0] = 1.0
    damp = np.exp(-np.pi * np.multiply.outer(y, k))
    return np.sum(basis * damp * u.coeffs, axis=-1)


_DENOM_FLOOR = 1e-14


def kernel_nu(x, y):
    """Singular kernel of the integral representation of I.

    Uses 1 - cos(t) = 2 sin(t/2)^2 to keep precision near the diagonal.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d1 = 2.0 * np.sin(0.5 * np.pi * (x - y)) ** 2
    d2 = 2.0 * np.sin(0.5 * np.pi * (x + y)) ** 2
    if np.any(d1 < _DENOM_FLOOR) or np.any(d2 < _DENOM_FLOOR):
        raise ValueError("kernel evaluated at a singular point")
    out = 0.5 * np.pi * (1.0 / d1 + 1.0 / d2)
    return out if out.ndim else float(out)


def apply_I_kernel(u: CosineField, x: float, pv_cut: float,
                   n_quad: int | None = None, window_correction: bool = True) -> float:
    """Principal-value quadrature of int (u(y) - u(x)) nu(x, y) dy.

    The window |y - x| < pv_cut is excluded symmetrically and each side is
    integrated with its own midpoint rule at spacing ~1/n_quad. The odd
    part of the singularity cancels, leaving an O(pv_cut) window term
    u''(x) pv_cut / pi; with ``window_correction`` it is added back using a
    three-point difference of u, so no spectral quantity enters.
    """
    n_quad = n_quad or u.grid.n_quad
    h = 1.0 / n_quad
    if not (0.0 < x < 1.0) or x - pv_cut <= 0.0 or x + pv_cut >= 1.0:
        raise ValueError("x must lie at least pv_cut inside the interval")
    if pv_cut <= h:
        raise ValueError("pv_cut must exceed the quadrature spacing")
    ux = float(evaluate(u, x))
    total = 0.0
    for a, b in ((0.0, x - pv_cut), (x + pv_cut, 1.0)):
        m = max(int(np.ceil((b - a) / h)), 1)
        y = a + (np.arange(m) + 0.5) * (b - a) / m
        total += np.sum((evaluate(u, y) - ux) * kernel_nu(x, y)) * (b - a) / m
    if window_correction:
        up, um = evaluate(u, [x + pv_cut, x - pv_cut])
        second = (up - 2.0 * ux + um) / pv_cut**2
        total += second * pv_cut / np.pi
    return float(total)


def kernel_seminorm_half(u: CosineField, n: int = 2000) -> float:
    """(1/2) double integral of (u(x)-u(y))^2 nu(x,y) on staggered midpoint grids.

    The integrand is bounded near the diagonal, so offsetting the y grid by a
    quarter cell keeps every node off the singular set.
    """
    x = (np.arange(n) + 0.5) / n
    y = (np.arange(n) + 0.25) / n
    ux = evaluate(u, x)
    uy = evaluate(u, y)
    diff2 = (ux[:, None] - uy[None, :]) ** 2
    nu = kernel_nu(x[:, None], y[None, :])
    return float(0.5 * np.sum(diff2 * nu) / n**2)
