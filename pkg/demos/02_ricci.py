"""Choosing Lambda and certifying the Ricci band of the rescaled metric."""

from ricciforge import suites
from ricciforge.metric import MetricParams, choose_lambda, lambda_margins, standard_grid

for k in range(1, 9):
    lam = choose_lambda(k, 0.05)
    m = lambda_margins(MetricParams(k, lam), standard_grid(k))
    band = suites.ricci_band(k, lam)
    print(f"k={k}: Lambda={lam:6.0f}  eigenvalues in [{m.min_eigenvalue:.2e}, {m.max_eigenvalue:.4f}]  "
          f"vertical <= {m.max_vertical:.4f}  {'ok' if band.passed else 'FAIL'}")

rep = suites.layer_consistency(3)
print(f"four formula layers agree to {rep.value:.1e}; {rep.notes}")
