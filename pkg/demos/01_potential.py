"""The dipole-ring potential on S^3.

Builds the Green's function, checks its radial equation, evaluates the
potential for a few k and shows where it is positive and negative.
"""

import numpy as np

from ricciforge.harmonic import green_radial, green_radial_d1, green_radial_d2, laplacian_u, potential_u
from ricciforge.s3core import PoleConfiguration, sample_grid, to_vec

s = np.linspace(0.1, 3.0, 100)
residual = np.abs(green_radial_d2(s) + 2 * np.cos(s) / np.sin(s) * green_radial_d1(s) - 1 / np.pi).max()
print(f"radial equation residual on (0.1, 3.0): {residual:.2e}")
print(f"s G(s) at s = 1e-4: {1e-4 * green_radial(1e-4):.6f} (pole strength 1/2)")

for k in (1, 3, 8):
    cfg = PoleConfiguration.roots_of_unity(k)
    x = sample_grid(5000, cfg, seed=0)
    u = potential_u(cfg, x, scaled=True)
    lap = np.abs(laplacian_u(cfg, x)).max()
    r1 = np.hypot(x[:, 0], x[:, 1])
    print(f"k={k}: u_k in [{u.min():+.2f}, {u.max():+.2f}], max |Lap u| = {lap:.1e}, "
          f"min u near F0 = {u[r1 > 0.9].min():+.3f}")

z = np.exp(1j * np.linspace(0, 6, 7)) / np.sqrt(2)
print("u on the circle z1 = z2:", np.abs(potential_u(PoleConfiguration.roots_of_unity(2), to_vec(z, z))).max())
