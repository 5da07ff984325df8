"""Power-law mobility, its clamped regularization and the entropy densities.

With f(u) = u^n and f_eps(u) = min(max(eps, |u|^n), M) the entropies
G and G_eps are the double antiderivatives of 1/f and 1/f_eps anchored at
u = A with zero value and slope. G_eps is assembled branch by branch:

    |u| < r = eps^(1/n)      quadratic, curvature 1/eps
    r <= |u| <= R = M^(1/n)   power-law branch
    |u| > R                   quadratic, curvature 1/M
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def f(u, n: float):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("unregularized mobility needs u >= 0")
    out = u**n
    return out if out.ndim else float(out)


def _particular(w, n):
    """A solution of P'' = w^-n on w > 0, and its derivative."""
    if n == 2:
        return -np.log(w), -1.0 / w
    if n == 1:
        return w * np.log(w) - w, np.log(w)
    return w ** (2 - n) / ((1 - n) * (2 - n)), w ** (1 - n) / (1 - n)


def G(u, n: float, anchor: float = 1.0):
    """Entropy density with G'' = u^-n, G(A) = G'(A) = 0, for u > 0."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("G is defined for u > 0 only")
    p, dp = _particular(u, n)
    pa, dpa = _particular(anchor, n)
    out = p - pa - dpa * (u - anchor)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MobilityModel:
    n: float
    eps: float
    cap_M: float
    anchor: float = 1.0

    def __post_init__(self):
        if not self.n > 1:
            raise ValueError("mobility exponent must exceed 1")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if not self.eps < self.cap_M:
            raise ValueError("eps < M required")
        if not self.anchor > 0:
            raise ValueError("anchor must be positive")
        if not self.r_eps < self.anchor < self.r_cap:
            raise ValueError(
                f"anchor {self.anchor} must lie in (eps^(1/n), M^(1/n)) = "
                f"({self.r_eps:.4g}, {self.r_cap:.4g})")

    @property
    def r_eps(self) -> float:
        return self.eps ** (1.0 / self.n)

    @property
    def r_cap(self) -> float:
        return self.cap_M ** (1.0 / self.n)

    def f(self, u):
        return f(u, self.n)

    def f_eps(self, u):
        """min(max(eps, |u|^n), M); with eps = 0 only the upper cap acts."""
        u = np.asarray(u, dtype=float)
        out = np.clip(np.abs(u) ** self.n, self.eps, self.cap_M)
        return out if out.ndim else float(out)

    def G(self, u):
        return G(u, self.n, self.anchor)

    def _breaks(self):
        """Value and slope of G_eps at r, -r, -R and R."""
        n, A, r, R = self.n, self.anchor, self.r_eps, self.r_cap
        pa, dpa = _particular(A, n)

        def power(w):
            p, dp = _particular(w, n)
            return p - pa - dpa * (w - A), dp - dpa

        g_r, d_r = power(r)
        g_R, d_R = power(R)
        # across (-r, r): curvature 1/eps
        g_mr = g_r - 2 * r * d_r + (2 * r) ** 2 / (2 * self.eps)
        d_mr = d_r - 2 * r / self.eps
        # negative power branch: G(-w) = P(w) + a + b w, matched at w = r
        pr, dpr = _particular(r, n)
        b = -d_mr - dpr
        a = g_mr - pr - b * r
        pR, dpR = _particular(R, n)
        g_mR = pR + a + b * R
        d_mR = -(dpR + b)
        return dict(g_r=g_r, d_r=d_r, g_R=g_R, d_R=d_R, g_mr=g_mr,
                    d_mr=d_mr, a=a, b=b, g_mR=g_mR, d_mR=d_mR, pa=pa, dpa=dpa)

    def G_eps(self, u):
        """Entropy density of the regularized problem; defined on all of R."""
        if self.eps <= 0:
            raise ValueError("G_eps needs eps > 0")
        u = np.asarray(u, dtype=float)
        n, A, r, R, eps, M = self.n, self.anchor, self.r_eps, self.r_cap, self.eps, self.cap_M
        c = self._breaks()
        out = np.empty_like(u)

        m = (u >= r) & (u <= R)
        p, _ = _particular(u[m], n)
        out[m] = p - c["pa"] - c["dpa"] * (u[m] - A)

        m = u > R
        d = u[m] - R
        out[m] = c["g_R"] + c["d_R"] * d + d**2 / (2 * M)

        m = (u > -r) & (u < r)
        d = u[m] - r
        out[m] = c["g_r"] + c["d_r"] * d + d**2 / (2 * eps)

        m = (u <= -r) & (u >= -R)
        w = -u[m]
        p, _ = _particular(w, n)
        out[m] = p + c["a"] + c["b"] * w

        m = u < -R
        d = u[m] + R
        out[m] = c["g_mR"] + c["d_mR"] * d + d**2 / (2 * M)
        return out if out.ndim else float(out)

    def dG_eps(self, u):
        """First derivative of G_eps."""
        u = np.asarray(u, dtype=float)
        n, A, r, R, eps, M = self.n, self.anchor, self.r_eps, self.r_cap, self.eps, self.cap_M
        c = self._breaks()
        out = np.empty_like(u)
        m = (u >= r) & (u <= R)
        out[m] = _particular(u[m], n)[1] - c["dpa"]
        m = u > R
        out[m] = c["d_R"] + (u[m] - R) / M
        m = (u > -r) & (u < r)
        out[m] = c["d_r"] + (u[m] - r) / eps
        m = (u <= -r) & (u >= -R)
        out[m] = -(_particular(-u[m], n)[1] + c["b"])
        m = u < -R
        out[m] = c["d_mR"] + (u[m] + R) / M
        return out if out.ndim else float(out)

    def df_eps(self, u):
        """Derivative of f_eps away from the clamp junctions (0 on flat parts)."""
        u = np.asarray(u, dtype=float)
        a = np.abs(u)
        inner = (a > self.r_eps) & (a < self.r_cap)
        out = np.where(inner, self.n * np.sign(u) * a ** (self.n - 1), 0.0)
        return out if out.ndim else float(out)
