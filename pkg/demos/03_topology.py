"""Chern integrals around the poles and over the Clifford torus, plus the diameter estimate."""

import numpy as np

from ricciforge import suites
from ricciforge.global_verify import chern_integral_clifford, chern_table
from ricciforge.s3core import PoleConfiguration

for k in (1, 2, 5):
    cfg = PoleConfiguration.roots_of_unity(k)
    t = chern_table(cfg, 0.1) / (2 * np.pi)
    print(f"k={k}: sphere integrals / 2pi  +: {np.round(t[0], 10)}  -: {np.round(t[1], 10)}  "
          f"torus / 2pi = {chern_integral_clifford(cfg) / (2 * np.pi):.10f}")

for k in (1, 4):
    r = suites.diameter(k, "auto", 5000)
    print(f"diameter estimate k={k}: {r.value:.4f} (bound pi + 0.2 = {np.pi + 0.2:.4f})")
print(f"round control: {suites.diameter_round(5000).value:.4f}")

for r in (0.05, 0.1):
    rep = suites.curve_length(2, r)
    print(f"curve length r={r}: {rep.value:.4f} <= {rep.extra['bound']:.4f} at Lambda={rep.parameters['lambda']:.0f}")
