"""The nonlocal operator three ways.

I(u) acts on the cosine basis by multiplying mode k by -k pi. The same
operator is the Dirichlet-to-Neumann map of the harmonic extension to the
half strip, and a principal-value integral against a singular kernel.
This script evaluates all three on one smooth field and prints how far
apart they are, then runs the full identity table.
"""
import numpy as np

from thinfilm import verify
from thinfilm.spectral import CosineField, GridSpec, apply_I, apply_I_kernel, seminorm_Hs

grid = GridSpec(8, 2**16)
u = CosineField(np.array([1.0, 0.6, -0.3, 0.0, 0.15, 0.0, 0.0, 0.05, 0.0]), grid)
xs = np.array([0.15, 0.4, 0.5, 0.72, 0.9])

spectral = apply_I(u)(xs)
kernel = np.array([apply_I_kernel(u, x, 1e-3) for x in xs])
extension = verify.extension_normal_derivative(u, xs)

print(f"{'x':>6} {'spectral':>12} {'kernel':>12} {'extension':>12}")
for row in zip(xs, spectral, kernel, extension):
    print("{:6.2f} {:12.6f} {:12.6f} {:12.6f}".format(*row))
print(f"max |kernel - spectral|    = {np.max(np.abs(kernel - spectral)):.2e}")
print(f"max |extension - spectral| = {np.max(np.abs(extension - spectral)):.2e}")

# -<u, I u> is the H^1/2 semi-norm; the energy subtracts it from |u|_H1^2
print(f"|u|^2_H1/2 = {seminorm_Hs(u, 0.5):.6f}, |u|^2_H1 = {seminorm_Hs(u, 1.0):.6f}")

print()
print(verify.format_table(verify.identity_suite(GridSpec(64), count=100)))
