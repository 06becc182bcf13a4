import numpy as np
import pytest

from ricciforge.curvature_oracle import (ChartMetric, circle_bundle_chart, conformal_ricci, conformally_scaled,
                                         contracted_bianchi_residual, curvature_at, flat_metric, metric_jet,
                                         sphere2_half_metric, sphere_gnomonic_metric, sphere_polar_metric)
from ricciforge.errors import SingularMetric


@pytest.mark.parametrize("n", [2, 3, 4])
def test_round_sphere_einstein_constant(n, rng):
    y = rng.uniform(0.3, 1.3, n)
    c = curvature_at(sphere_polar_metric(n), y)
    assert np.allclose(c.ricci, (n - 1) * c.metric, atol=1e-10)
    assert np.isclose(c.scalar, n * (n - 1))


def test_radius_scaling(rng):
    y = rng.uniform(0.3, 1.3, 3)
    c = curvature_at(sphere_polar_metric(3, radius=2.0), y)
    assert np.isclose(c.scalar, 6 / 4)


def test_flat_metric_has_no_curvature():
    c = curvature_at(flat_metric(4), np.zeros(4))
    assert np.allclose(c.riemann, 0)


def test_gnomonic_chart_and_finite_differences(rng):
    z = rng.normal(size=3) * 0.4
    jet = curvature_at(sphere_gnomonic_metric(), z)
    fd = curvature_at(sphere_gnomonic_metric(), z, scheme="fd", h=1e-3)
    assert np.allclose(jet.ricci, 2 * jet.metric, atol=1e-10)
    assert np.allclose(fd.ricci, jet.ricci, atol=1e-5)
    with pytest.raises(ValueError):
        metric_jet(sphere_gnomonic_metric(), z, scheme="spline")


def test_riemann_symmetries(rng):
    metric = conformally_scaled(sphere_polar_metric(4), lambda y: 0.2 * np.sin(y[0]) * y[1])
    c = curvature_at(metric, rng.uniform(0.4, 1.2, 4))
    assert max(c.symmetry_residuals().values()) < 1e-9


def test_contracted_bianchi(rng):
    metric = conformally_scaled(sphere_polar_metric(3), lambda y: 0.3 * np.cos(y[1]) + 0.1 * y[0] * y[2])
    assert contracted_bianchi_residual(metric, rng.uniform(0.4, 1.2, 3)) < 1e-5


def test_conformal_ricci_matches_brute_force(rng):
    metric = sphere_polar_metric(4)
    phi = lambda y: 0.3 * np.sin(y[0]) * np.cos(y[1]) + 0.1 * y[2] * y[3]  # noqa: E731
    y = rng.uniform(0.4, 1.2, 4)
    assert np.allclose(conformal_ricci(metric, phi, y), curvature_at(conformally_scaled(metric, phi), y).ricci,
                       atol=1e-9)


def test_hopf_bundle_oracles(rng):
    base = sphere2_half_metric()
    conn = lambda y: np.array([0.0 * y[0], np.sin(y[0]) ** 2])  # noqa: E731
    y = np.array([0.7, 1.1, 0.4])
    round_s3 = curvature_at(circle_bundle_chart(base, lambda z: 1.0 + 0.0 * z[0], conn), y)
    assert np.allclose(np.sort(round_s3.ricci_eigenvalues()), [2, 2, 2], atol=1e-10)
    berger = curvature_at(circle_bundle_chart(base, lambda z: 0.36 + 0.0 * z[0], conn), y)
    assert np.allclose(np.sort(berger.ricci_eigenvalues()), [0.72, 3.28, 3.28], atol=1e-10)


def test_singular_metric_raises():
    degenerate = ChartMetric(2, lambda y: np.array([[1.0 + 0 * y[0], 0.0], [0.0, 0.0 * y[1]]], dtype=object))
    with pytest.raises(SingularMetric):
        curvature_at(degenerate, np.array([0.1, 0.2]))
