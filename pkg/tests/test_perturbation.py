import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ricciforge.curvature_oracle import curvature_at
from ricciforge.errors import Unsatisfiable
from ricciforge.perturbation import (BumpProfile, FrameBundleParams, ball_samples, choose_dk, frame_bundle_ricci,
                                     hessian_rho, kulkarni_nomizu, model_chart, model_curvature_tensor, model_rho,
                                     model_rho_check, perturbation_check, relative_eigenvalues, smoothstep5)


def test_kulkarni_nomizu_is_an_algebraic_curvature_tensor(rng):
    A = rng.normal(size=(4, 4))
    A = A + A.T
    R = kulkarni_nomizu(A, np.eye(4))
    assert np.allclose(R, -R.transpose(1, 0, 2, 3))
    assert np.allclose(R, R.transpose(2, 3, 0, 1))
    bianchi = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
    assert np.allclose(bianchi, 0)


def test_model_chart_has_the_prescribed_curvature():
    k, lam = 1, 4.0
    R = model_curvature_tensor(seed=1)
    c = curvature_at(model_chart(k, lam, R), np.zeros(4))
    assert np.allclose(c.metric, np.eye(4) / (k * lam))
    # in h-normal coordinates z = y / sqrt(k lam), Ric_ij = R_kikj; y-components carry 1/(k lam)
    ric_z = np.einsum("kikj->ij", R)
    assert np.allclose(c.ricci * k * lam, ric_z, atol=1e-10)
    assert np.all(np.linalg.eigvalsh(ric_z) > 0)


def test_flat_model_hessian_of_rho_is_the_metric(rng):
    k, lam = 2, 8.0
    metric = model_chart(k, lam)
    for y in ball_samples(0.5, 5, seed=1):
        H, g, h = hessian_rho(metric, model_rho(k, lam), y)
        assert np.allclose(H, h, atol=1e-14)


def test_rho_check_report():
    rep = model_rho_check(1, 32.0, curvature=model_curvature_tensor(seed=0))
    assert rep.flat_hessian_error < 1e-12
    assert rep.min_ratio >= 0.5
    assert rep.passed


@given(st.floats(0, 1))
def test_smoothstep(s):
    v = smoothstep5(s)
    assert -1e-12 <= v <= 1 + 1e-12
    assert smoothstep5(0.0) == 0 and smoothstep5(1.0) == 1


def test_bump_profile():
    b = BumpProfile(0.1, 1e-3)
    assert b.eta(0.05) == 0.05 and b.eta(0.3) == 0.0
    assert 0 < b.eta(0.15) < 0.15
    m, c1, c2 = b.derivative_bounds()
    # eta overshoots r slightly inside the blend
    assert 0.1 <= m < 0.2 and c1 >= 1
    with pytest.raises(ValueError):
        BumpProfile(0.0, 1.0)


def test_relative_eigenvalues():
    assert np.allclose(relative_eigenvalues(np.diag([2.0, 6.0]), np.diag([1.0, 3.0])), [2, 2])


def test_perturbation_stays_positive():
    rep = perturbation_check(1, 32.0, curvature=model_curvature_tensor(seed=0), samples=12)
    assert rep.passed
    assert rep.inner_min > 0 and rep.outer_min > 0
    assert rep.eps * rep.c_measured < rep.ric_lower


def test_frame_bundle_criterion():
    d = choose_dk(1.0, 1.0, 1.0, margin=2.0)
    res = frame_bundle_ricci(FrameBundleParams(d, 1.0, 1.0, 1.0), margin=2.0)
    assert res.positive
    assert np.isclose(res.vertical, d**-2)
    # shrinking d further keeps positivity
    assert frame_bundle_ricci(FrameBundleParams(d / 2, 1.0, 1.0, 1.0), margin=2.0).positive
    # too large a fibre loses it
    assert not frame_bundle_ricci(FrameBundleParams(10.0, 1.0, 1.0, 1.0), margin=2.0).positive
    with pytest.raises(Unsatisfiable):
        choose_dk(0.0, 1.0, 1.0)
