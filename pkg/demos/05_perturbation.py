"""Local conformal perturbation near an added point, and the frame-bundle criterion."""

from ricciforge import suites
from ricciforge.perturbation import FrameBundleParams, choose_dk, frame_bundle_ricci

for rep in suites.perturbation_suite(1):
    print(rep.claim_id, "passed" if rep.passed else "FAILED", {k: round(v, 6) for k, v in rep.extra.items()})

d = choose_dk(1.0, 1.0, 1.0, margin=2.0)
res = frame_bundle_ricci(FrameBundleParams(d, 1.0, 1.0, 1.0), margin=2.0)
print(f"fibre size d_k = {d:g}: vertical {res.vertical:.3g}, mixed <= {res.mixed_bound:.3g}, "
      f"horizontal >= {res.horizontal_lower:.3g}")
print("ric_lower = 0 fails as expected:", not suites.framebundle(0.0, 1.0, 1.0).passed)
