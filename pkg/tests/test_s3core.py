import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ricciforge.errors import EmptySample, PoleCoincidence
from ricciforge.s3core import (PoleConfiguration, TorusActionElement, exp_map, geodesic_distance, grad_distance,
                               hopf_points, involution, sample_grid, sphere2_quadrature, tangent_frame, to_complex,
                               to_vec, torus_act, tube_distance, volume_form)

from conftest import random_sphere

angles = st.floats(0, 2 * np.pi)
weights = st.floats(0.01, 0.99)


def test_complex_round_trip(rng):
    x = random_sphere(rng, 20)
    z1, z2 = to_complex(x)
    assert np.allclose(to_vec(z1, z2), x)


def test_tangent_frame_orthonormal_and_oriented(rng):
    x = random_sphere(rng, 50)
    E = tangent_frame(x)
    gram = np.einsum("nia,nja->nij", E, E)
    assert np.allclose(gram, np.eye(3))
    assert np.allclose(np.einsum("nia,na->ni", E, x), 0)
    assert np.allclose(volume_form(x, E[:, 0], E[:, 1], E[:, 2]), 1.0)


def test_first_frame_vector_is_hopf_direction(rng):
    x = random_sphere(rng, 10)
    z1, z2 = to_complex(x)
    assert np.allclose(tangent_frame(x)[:, 0], to_vec(1j * z1, 1j * z2))


@given(weights, angles, angles, st.floats(0.01, 3.0))
def test_exp_map_moves_by_its_length(w, a, b, t):
    x = hopf_points(w, a, b)
    v = t * tangent_frame(x)[1]
    assert np.isclose(geodesic_distance(x, exp_map(x, v)), t, atol=1e-7)


def test_grad_distance_unit_and_guarded(rng):
    x = random_sphere(rng, 5)
    p = random_sphere(rng, 5)
    g = grad_distance(x, p)
    assert np.allclose(np.linalg.norm(g, axis=-1), 1.0)
    with pytest.raises(PoleCoincidence):
        grad_distance(p, p)
    with pytest.raises(PoleCoincidence):
        grad_distance(p, -p)


def test_grad_distance_matches_finite_difference(rng):
    x, p = random_sphere(rng, 1)[0], random_sphere(rng, 1)[0]
    g = grad_distance(x, p)
    for e in tangent_frame(x):
        h = 1e-6
        fd = (geodesic_distance(exp_map(x, h * e), p) - geodesic_distance(exp_map(x, -h * e), p)) / (2 * h)
        assert np.isclose(fd, g @ e, atol=1e-7)


@given(st.integers(1, 8), st.integers(-10, 10), st.integers(-10, 10), weights, angles, angles)
def test_torus_action_is_an_isometry_preserving_poles(k, l1, l2, w, a, b):
    g = TorusActionElement(l1, l2, k)
    x, y = hopf_points(w, a, b), hopf_points(1 - w, b, a)
    assert np.isclose(geodesic_distance(torus_act(g, x), torus_act(g, y)), geodesic_distance(x, y), atol=1e-9)
    assert np.allclose(torus_act(g.inverse(), torus_act(g, x)), x)
    cfg = PoleConfiguration.roots_of_unity(k)
    moved = torus_act(g, cfg.poles)
    assert np.allclose(np.sort(moved @ cfg.poles.T, axis=1)[:, -1], 1.0)


def test_involution_swaps_pole_families():
    cfg = PoleConfiguration.roots_of_unity(3)
    assert np.allclose(involution(cfg.positive_poles), cfg.negative_poles)


@pytest.mark.parametrize("k", [1, 2, 5, 8])
def test_pole_configuration(k):
    cfg = PoleConfiguration.roots_of_unity(k)
    assert cfg.poles.shape == (2 * k, 4)
    assert np.allclose(np.linalg.norm(cfg.poles, axis=1), 1)
    # same-fibre neighbours are 2 pi / k apart, the two fibres pi / 2
    assert np.isclose(cfg.min_separation(), min(2 * np.pi / k, np.pi / 2))
    assert cfg.signs.sum() == 0
    with pytest.raises(ValueError):
        PoleConfiguration.roots_of_unity(0)


def test_tube_distances_complementary(rng):
    d0, d1 = tube_distance(random_sphere(rng, 30))
    assert np.allclose(d0 + d1, np.pi / 2)


def test_sample_grid_deterministic_and_excluded():
    cfg = PoleConfiguration.roots_of_unity(4, exclusion_radius=0.2)
    a, b = sample_grid(2048, cfg, seed=3), sample_grid(2048, cfg, seed=3)
    assert np.array_equal(a, b)
    assert cfg.distance_to_poles(a).min() > 0.2
    assert len(a) < 2048
    with pytest.raises(EmptySample):
        sample_grid(16, PoleConfiguration.roots_of_unity(1, exclusion_radius=4.0))


def test_sample_grid_is_roughly_uniform():
    x = sample_grid(4096, seed=1)
    # uniform measure: E[x_i^2] = 1/4, E[x] = 0
    assert np.allclose((x**2).mean(axis=0), 0.25, atol=5e-3)
    assert np.allclose(x.mean(axis=0), 0, atol=1e-2)


@pytest.mark.parametrize("r", [0.05, 0.3, 0.7])
def test_sphere2_quadrature_area_and_orientation(r):
    c = to_vec(np.array(1.0 + 0j), np.array(0j))
    q = sphere2_quadrature(c, r, 24)
    assert np.isclose(q.weights.sum(), 4 * np.pi * np.sin(r) ** 2, rtol=1e-10)
    assert np.allclose(geodesic_distance(q.points, c), r)
    det = volume_form(q.points, q.normals, q.tangents[:, 0], q.tangents[:, 1])
    assert np.allclose(det, 1.0)


def test_sphere2_quadrature_rejects_large_radius():
    with pytest.raises(ValueError):
        sphere2_quadrature(to_vec(np.array(1.0 + 0j), np.array(0j)), 1.0, 8)
