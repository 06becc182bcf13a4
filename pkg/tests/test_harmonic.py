import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from ricciforge.errors import DomainError, PoleCoincidence
from ricciforge.harmonic import (Potential, bound_check_u, discrete_laplacian, grad_u, green_radial, green_radial_d1,
                                 green_radial_d2, hess_u, laplacian_u, potential_u, radial_laplacian)
from ricciforge.jets import Jet, unpack
from ricciforge.s3core import (PoleConfiguration, TorusActionElement, exp_map, hopf_points, involution, sample_grid,
                               tangent_frame, to_complex, to_vec, torus_act)

from conftest import random_sphere


def test_green_solves_radial_equation_symbolically():
    s = sp.symbols("s", positive=True)
    G = (sp.pi - s) * sp.cot(s) / (2 * sp.pi)
    assert sp.simplify(sp.diff(G, s, 2) + 2 * sp.cot(s) * sp.diff(G, s) - 1 / sp.pi) == 0
    assert sp.limit(s * G, s, 0) == sp.Rational(1, 2)
    assert sp.simplify(G.subs(s, sp.pi / 2)) == 0


def test_green_derivatives_match_sympy():
    s = sp.symbols("s")
    G = (sp.pi - s) * sp.cot(s) / (2 * sp.pi)
    d1, d2 = sp.lambdify(s, sp.diff(G, s)), sp.lambdify(s, sp.diff(G, s, 2))
    grid = np.linspace(0.1, 3.0, 50)
    assert np.allclose(green_radial_d1(grid), d1(grid), rtol=1e-12)
    assert np.allclose(green_radial_d2(grid), d2(grid), rtol=1e-12)
    assert np.allclose(radial_laplacian(green_radial_d1(grid), green_radial_d2(grid), grid), 1 / np.pi)


@pytest.mark.parametrize("s", [0.0, np.pi, -1.0])
def test_green_domain(s):
    with pytest.raises(DomainError):
        green_radial(s)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_potential_is_harmonic(k, rng):
    cfg = PoleConfiguration.roots_of_unity(k)
    x = sample_grid(200, cfg.with_exclusion(0.2), seed=k)
    assert np.abs(laplacian_u(cfg, x)).max() < 1e-9
    # six-point stencil agrees to O(h^2)
    assert np.abs(discrete_laplacian(cfg, x[:20], 1e-3)).max() < 1e-3


@pytest.mark.parametrize("k", [1, 3, 4])
def test_gradient_and_hessian_match_finite_differences(k, rng):
    cfg = PoleConfiguration.roots_of_unity(k)
    x = sample_grid(64, cfg.with_exclusion(0.3), seed=2)[:8]
    g, H = grad_u(cfg, x), hess_u(cfg, x)
    h = 1e-5
    for e in np.moveaxis(tangent_frame(x), -2, 0):
        fd = (potential_u(cfg, exp_map(x, h * e)) - potential_u(cfg, exp_map(x, -h * e))) / (2 * h)
        assert np.allclose(np.einsum("na,na->n", g, e), fd, atol=1e-6)
        fd2 = (potential_u(cfg, exp_map(x, h * 100 * e)) - 2 * potential_u(cfg, x)
               + potential_u(cfg, exp_map(x, -h * 100 * e))) / (h * 100) ** 2
        assert np.allclose(np.einsum("na,nab,nb->n", e, H, e), fd2, atol=1e-4 * (1 + np.abs(fd2)))


def test_jet_path_matches_float_path(rng):
    cfg = PoleConfiguration.roots_of_unity(3)
    x = sample_grid(32, cfg.with_exclusion(0.3), seed=4)[0]
    v, g, _ = unpack(potential_u(cfg, Jet.variables(x)))
    assert np.isclose(v, potential_u(cfg, x), rtol=1e-12)
    # the ambient gradient's tangential part is the Riemannian gradient
    gt = g - (g @ x) * x
    assert np.allclose(gt, grad_u(cfg, x), atol=1e-10)


@given(st.integers(1, 6), st.floats(0.05, 0.95), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi),
       st.integers(0, 5), st.integers(0, 5))
def test_symmetries(k, w, a, b, l1, l2):
    cfg = PoleConfiguration.roots_of_unity(k)
    x = hopf_points(w, a, b)
    if cfg.distance_to_poles(x) < 1e-3:
        return
    u = potential_u(cfg, x)
    scale = 1 + abs(u)
    assert np.isclose(potential_u(cfg, involution(x)), -u, atol=1e-10 * scale)
    assert np.isclose(potential_u(cfg, torus_act(TorusActionElement(l1, l2, k), x)), u, atol=1e-10 * scale)
    assert np.isclose(potential_u(cfg, x, scaled=True), u / k, atol=1e-14 * scale)


@pytest.mark.parametrize("k", [1, 2, 7])
def test_vanishes_on_the_swap_fixed_circle(k):
    cfg = PoleConfiguration.roots_of_unity(k)
    z = np.exp(1j * np.linspace(0.01, 6.2, 40)) / np.sqrt(2)
    assert np.abs(potential_u(cfg, to_vec(z, z))).max() < 1e-12


def test_does_not_vanish_on_the_whole_clifford_torus():
    # the swap preserves the torus only as a set
    cfg = PoleConfiguration.roots_of_unity(1)
    x = to_vec(np.array(np.exp(0.3j)) / np.sqrt(2), np.array(np.exp(2.0j)) / np.sqrt(2))
    assert abs(potential_u(cfg, x)) > 0.1


@pytest.mark.parametrize("k", [3, 5, 8])
def test_sign_near_the_fibres(k):
    cfg = PoleConfiguration.roots_of_unity(k)
    x = sample_grid(4000, cfg.with_exclusion(1e-3), seed=5)
    r1 = np.hypot(x[:, 0], x[:, 1])
    u = potential_u(cfg, x)
    assert np.all(u[r1 > 0.9] > 0)
    assert np.all(u[r1 < np.sqrt(1 - 0.81)] < 0)


@pytest.mark.parametrize("k", [1, 2])
def test_sign_fails_between_sparse_poles(k):
    # with one or two poles per fibre, points on F0 far from every pole see G < 0
    cfg = PoleConfiguration.roots_of_unity(k)
    x = to_vec(np.array(0.95 * np.exp(1j * np.pi / k)), np.array(np.sqrt(1 - 0.95**2) + 0j))
    assert potential_u(cfg, x) < 0


def test_pole_singularity_and_guard():
    cfg = PoleConfiguration.roots_of_unity(2)
    p = cfg.pole(0, 0)
    e = tangent_frame(p)[1]
    for d in (1e-3, 1e-5):
        assert np.isclose(d * potential_u(cfg, exp_map(p, d * e)), 0.5, atol=2 * d)
    with pytest.raises(PoleCoincidence):
        potential_u(cfg, p)
    # the antipode of a pole is a regular point of G
    assert np.isfinite(potential_u(PoleConfiguration.roots_of_unity(1), -p))


def test_potential_class_and_bound(rng):
    pot = Potential.for_k(2)
    x = random_sphere(rng, 50)
    assert np.allclose(pot(x), potential_u(pot.poles, x))
    assert np.allclose(pot.laplacian(x), 0, atol=1e-8)
    rep = bound_check_u(pot.poles, sample_grid(4000, seed=1))
    assert np.isfinite(rep.c_star) and rep.samples == 4000
