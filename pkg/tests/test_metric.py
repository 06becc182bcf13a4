import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ricciforge.errors import NotFound
from ricciforge.metric import (V1, V2, MetricParams, RicciForm, V, V_literal, choose_lambda,
                               conformal_ricci_identity, fiber_length, hodge_1form, lambda_margins,
                               relative_deviation, ricci_closed_form, ricci_layers, sech2, standard_grid,
                               w_of_potential)
from ricciforge.s3core import exp_map, tangent_frame


@given(st.floats(-5, 5))
def test_profile_identities(x):
    assert np.isclose(V(x), V_literal(x), rtol=1e-13, atol=1e-15)
    assert np.isclose(V1(x) ** 2 + sech2(x), 1.0)
    h = 1e-5
    assert np.isclose((V(x + h) - V(x - h)) / (2 * h), V1(x), atol=1e-8)
    assert np.isclose((V1(x + h) - V1(x - h)) / (2 * h), V2(x), atol=1e-6 * (1 + V2(x)))
    assert V(x) >= V(0.0)


def test_profile_at_zero_and_large_arguments():
    assert np.isclose(V(0.0), np.log(4) / (4 * np.pi))
    assert np.isclose(V2(0.0), 2 * np.pi)
    assert np.isclose(V(100.0), 100.0)
    with np.errstate(over="ignore"):
        assert not np.isfinite(V_literal(100.0))


def test_params_validation():
    with pytest.raises(ValueError):
        MetricParams(0, 10.0)
    with pytest.raises(ValueError):
        MetricParams(2, 1.0)
    p = MetricParams(3, 8.0)
    W, W1, W2 = p.W(0.0)
    assert np.isclose(W, 3 * (V(0.0) + 8.0)) and W1 == 0 and np.isclose(W2, 2 * np.pi / 3)


def test_ricci_form_container():
    f = RicciForm(np.array(1.0), np.array([0.1, 0.0, 0.0]), np.diag([2.0, 3.0, 4.0]))
    m = f.matrix
    assert m.shape == (4, 4) and np.allclose(m, m.T)
    assert np.isclose(f.evaluate([1, 1, 0, 0]), 1 + 0.2 + 2)
    assert np.allclose(f.scaled(2.0).matrix, 2 * m)
    assert np.allclose(relative_deviation(f, f), 0)


def test_hodge_star_is_isometric():
    a = np.array([0.3, -1.2, 0.5])
    w = hodge_1form(a)
    assert np.allclose(w, -w.T)
    assert np.isclose(0.5 * np.sum(w * w), a @ a)
    assert np.isclose(w[0, 1], a[2])


@pytest.mark.parametrize("k", [1, 2, 4])
def test_formula_layers_agree(k):
    x = standard_grid(k, 64, seed=3)
    layers = ricci_layers(MetricParams(k, 32.0), x)
    ref = layers["closed_form"]
    for name, form in layers.items():
        assert relative_deviation(form, ref).max() < 1e-9, name
    assert np.abs(layers["general"].mixed).max() < 1e-9 * np.abs(ref.matrix).max()


def test_basefin_power_one_is_inconsistent():
    x = standard_grid(2, 64, seed=3)
    p = MetricParams(2, 32.0)
    dev = relative_deviation(ricci_closed_form(p, x, basefin_power=1), ricci_layers(p, x)["general"]).max()
    assert dev > 1e-5


@pytest.mark.parametrize("k,expected", [(1, 512.0), (2, 128.0), (3, 64.0), (4, 32.0)])
def test_choose_lambda_values(k, expected):
    lam = choose_lambda(k, 0.05)
    assert lam == expected
    m = lambda_margins(MetricParams(k, lam), standard_grid(k))
    assert m.satisfied(0.05)
    assert not lambda_margins(MetricParams(k, lam / 2), standard_grid(k)).satisfied(0.05)


def test_choose_lambda_stable_under_resampling():
    lam = choose_lambda(3, 0.05)
    assert lambda_margins(MetricParams(3, lam), standard_grid(3, seed=11)).satisfied(0.05)


def test_choose_lambda_errors():
    with pytest.raises(ValueError):
        choose_lambda(1, 0.5)
    with pytest.raises(NotFound):
        choose_lambda(1, 0.05, n=512, max_exponent=3)


def test_fiber_length():
    p = MetricParams(2, 64.0)
    x = standard_grid(2, 500)
    assert np.all(fiber_length(p, x) <= 1 / (2 * 64.0))
    pole = p.poles.pole(0, 0)
    e = tangent_frame(pole)[1]
    lengths = [float(fiber_length(p, exp_map(pole, s * e))) for s in (0.1, 0.05, 0.01)]
    assert lengths[0] > lengths[1] > lengths[2]


def test_conformal_identity_coefficient():
    W = w_of_potential(MetricParams(2, 16.0))
    x = standard_grid(2, 8, seed=1)[2]
    res_half, lhs, rhs = conformal_ricci_identity(W, x)
    assert res_half < 1e-8
    assert np.allclose(lhs, lhs.T, atol=1e-10)
    assert conformal_ricci_identity(W, x, gradient_coefficient=2.0)[0] > 100 * res_half
    assert conformal_ricci_identity(W, x, scheme="fd", h=1e-3)[0] < 1e-4
